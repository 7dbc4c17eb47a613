"""Matroid unions, the parallel-copy extension and the extended k-fold union.

Union rank is computed with the matroid partition algorithm: elements are
inserted one at a time, and each insertion searches the exchange graph for a
shortest augmenting path (breadth-first), which keeps every part independent.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from ..errors import InputError
from .base import Matroid, PartitionStructure, as_subset


def _independent(m: Matroid, s: frozenset[int]) -> bool:
    return m.rank(s) == len(s)


def partition_into_independent(parts: Sequence[Matroid], s: Iterable[int]) -> list[set[int]]:
    """Greedy matroid partition of ``s``: a maximum set of elements split into parts[j]-independent sets.

    Elements that cannot be added are left out; the union of the returned
    sets is a basis of ``s`` in the union matroid.
    """
    sets: list[set[int]] = [set() for _ in parts]
    owner: dict[int, int] = {}
    for x in sorted(s):
        _augment(parts, sets, owner, x)
    return sets


def _augment(parts, sets, owner, x) -> bool:
    # BFS over elements; parent[y] = (z, j) means "put z into part j, evicting y".
    parent: dict[int, tuple[int, int] | None] = {x: None}
    queue = deque([x])
    while queue:
        z = queue.popleft()
        for j, part in enumerate(parts):
            if owner.get(z) == j:
                continue
            cur = sets[j]
            fz = frozenset(cur) | {z}
            if _independent(part, fz):
                _apply(sets, owner, parent, z, j)
                return True
            for y in sorted(cur):
                if y in parent:
                    continue
                if _independent(part, fz - {y}):
                    parent[y] = (z, j)
                    queue.append(y)
    return False


def _apply(sets, owner, parent, z, j):
    # Insert z into part j, then walk back moving each evicting element into place.
    while True:
        prev_owner = owner.get(z)
        if prev_owner is not None:
            sets[prev_owner].discard(z)
        sets[j].add(z)
        owner[z] = j
        link = parent[z]
        if link is None:
            return
        z, j = link


class UnionMatroid(Matroid):
    """Union of matroids on a common ground set: sets splitting into one independent set per part."""

    kind = "union"

    def __init__(self, parts: Sequence[Matroid], labels=None):
        parts = list(parts)
        if not parts:
            raise InputError("a union needs at least one part")
        sizes = {p.size for p in parts}
        if len(sizes) != 1:
            raise InputError(f"union parts must share one ground set (sizes {sorted(sizes)})")
        super().__init__(sizes.pop(), labels)
        self.parts = parts
        dicts = [p.to_dict() for p in parts]
        self.is_kfold = all(d == dicts[0] for d in dicts)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def base(self) -> Matroid:
        return self.parts[0]

    def _rank(self, s):
        ps = self.partition_structure()
        if ps is not None:
            return ps.rank(s)
        return sum(len(t) for t in partition_into_independent(self.parts, s))

    def decompose(self, s: Iterable[int]) -> list[set[int]]:
        return partition_into_independent(self.parts, as_subset(s, self.size))

    def partition_structure(self):
        # Union of partition matroids over identical blocks is again one: capacities add.
        structures = [p.partition_structure() for p in self.parts]
        if any(ps is None for ps in structures):
            return None
        first = structures[0]
        if not all(np.array_equal(ps.block, first.block) and ps.n_blocks == first.n_blocks for ps in structures):
            return None
        return PartitionStructure(first.block, sum(ps.capacity for ps in structures))

    def to_dict(self):
        return {"kind": "union", "parts": [p.to_dict() for p in self.parts]}


def kfold_union(base: Matroid, k: int) -> UnionMatroid:
    if k < 1:
        raise InputError("k must be >= 1")
    return UnionMatroid([base] * k)


def union_rank(bases: Sequence[Matroid], s: Iterable[int]) -> int:
    """Rank of ``s`` in the union of ``bases`` by augmenting-path matroid partition."""
    bases = list(bases)
    if not bases:
        raise InputError("union_rank needs at least one matroid")
    sizes = {b.size for b in bases}
    if len(sizes) != 1:
        raise InputError("all matroids in a union must share one ground set")
    fs = as_subset(s, bases[0].size)
    return sum(len(t) for t in partition_into_independent(bases, fs))


class ParallelExtension(Matroid):
    """``k`` parallel copies of every base element, base-major: index = e*k + (copy-1)."""

    kind = "parallel"

    def __init__(self, base: Matroid, k: int):
        if k < 1:
            raise InputError("k must be >= 1")
        super().__init__(base.size * k)
        self.base = base
        self.k = int(k)

    def project(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(e // self.k for e in s)

    def _rank(self, s):
        return self.base.rank(self.project(s))

    def to_dict(self):
        return {"kind": "parallel", "base": self.base.to_dict(), "k": self.k}


class ExtendedKFoldUnion(Matroid):
    """k-fold union of the parallel-copy extension of ``base``.

    Element ``(e, i)`` with copy ``i`` in ``1..k`` lives at index ``e*k + i - 1``,
    so the first copies ``E x {1}`` are the indices ``{e*k}``.
    """

    kind = "extended_kfold"

    def __init__(self, base: Matroid, k: int):
        if k < 1:
            raise InputError("k must be >= 1")
        super().__init__(base.size * k)
        self.base = base
        self.k = int(k)
        self._parallel = ParallelExtension(base, k)
        self._union = UnionMatroid([self._parallel] * self.k)
        self._ps = self._structure()

    def index(self, e: int, copy: int) -> int:
        if not (0 <= e < self.base.size and 1 <= copy <= self.k):
            raise InputError(f"no extended element ({e}, {copy})")
        return e * self.k + copy - 1

    def element(self, idx: int) -> tuple[int, int]:
        return idx // self.k, idx % self.k + 1

    def group(self, e: int) -> frozenset[int]:
        """All k copies of base element ``e``."""
        return frozenset(range(e * self.k, (e + 1) * self.k))

    def groups(self, base_elements: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for e in base_elements:
            out |= self.group(e)
        return frozenset(out)

    def first_copies(self) -> list[int]:
        return [e * self.k for e in range(self.base.size)]

    def project(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(i // self.k for i in s)

    def is_group_union(self, s: Iterable[int]) -> bool:
        fs = frozenset(s)
        return all(self.group(e) <= fs for e in self.project(fs))

    def _structure(self):
        bps = self.base.partition_structure()
        if bps is None:
            return None
        block = np.repeat(bps.block, self.k) if bps.block.size else np.zeros(0, dtype=np.int64)
        return PartitionStructure(block, bps.capacity * self.k)

    def partition_structure(self):
        return self._ps

    def _rank(self, s):
        if self._ps is not None:
            return self._ps.rank(s)
        if self.k == 1:
            return self.base.rank(s)
        return self._union.rank(s)

    def restrict_groups(self, base_elements: Iterable[int]) -> tuple["ExtendedKFoldUnion", list[int]]:
        """Restriction to ``S0 x [k]`` as an extended union of ``base|S0`` plus the local->global index map."""
        from .families import Restriction

        s0 = sorted(as_subset(base_elements, self.base.size))
        sub = ExtendedKFoldUnion(Restriction(self.base, s0), self.k)
        mapping = [e * self.k + i for e in s0 for i in range(self.k)]
        return sub, mapping

    def to_dict(self):
        return {"kind": "extended_kfold", "base": self.base.to_dict(), "k": self.k}


def extend_kfold(base: Matroid, k: int) -> ExtendedKFoldUnion:
    return ExtendedKFoldUnion(base, k)


def occupancy(mk: ExtendedKFoldUnion, e: int, s: Iterable[int]) -> int:
    """Slots of base element ``e`` consumed by ``s``: k - rank(S ∪ {e}x[k]) + rank(S)."""
    if not 0 <= e < mk.base.size:
        raise InputError(f"base element {e} out of range")
    fs = as_subset(s, mk.size)
    return mk.k - mk.rank(fs | mk.group(e)) + mk.rank(fs)


def occupancy_batch(mk: ExtendedKFoldUnion, e: int, masks: np.ndarray) -> np.ndarray:
    """Vectorised occupancy over the rows of a boolean ``(N, k*n)`` matrix."""
    masks = np.asarray(masks, dtype=bool)
    with_group = masks.copy()
    with_group[:, sorted(mk.group(e))] = True
    return mk.k - mk.rank_batch(with_group) + mk.rank_batch(masks)
