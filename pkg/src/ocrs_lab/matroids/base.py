"""Rank-oracle matroid abstraction.

A matroid is nothing but a rank function over dense element indices
``0..size-1``; independence, span, restriction and girth are derived from it.
"""
from __future__ import annotations

import itertools
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import CapabilityError, InputError

GIRTH_ENUM_LIMIT = 24


@dataclass(frozen=True)
class GroundSet:
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 0:
            raise InputError("ground set size must be >= 0")
        if self.labels is not None and len(self.labels) != self.size:
            raise InputError("labels must match the ground set size")

    def label(self, e: int) -> str:
        return self.labels[e] if self.labels else str(e)


@dataclass(frozen=True)
class PartitionStructure:
    """Block id per element and per-block capacity: rank(S) = sum_b min(cap_b, |S ∩ b|)."""

    block: np.ndarray
    capacity: np.ndarray

    @property
    def n_blocks(self) -> int:
        return int(self.capacity.shape[0])

    def onehot(self) -> np.ndarray:
        m = np.zeros((self.block.shape[0], self.n_blocks), dtype=np.int64)
        m[np.arange(self.block.shape[0]), self.block] = 1
        return m

    def rank(self, members: Iterable[int]) -> int:
        idx = list(members)
        if not idx:
            return 0
        counts = np.bincount(self.block[idx], minlength=self.n_blocks)
        return int(np.minimum(counts, self.capacity).sum())


def as_subset(s: Iterable[int] | None, size: int) -> frozenset[int]:
    if s is None:
        return frozenset()
    fs = s if isinstance(s, frozenset) else frozenset(int(e) for e in s)
    for e in fs:
        if e < 0 or e >= size:
            raise InputError(f"element {e} out of range for ground set of size {size}")
    return fs


class Matroid(ABC):
    """Base class; subclasses implement :meth:`_rank` on validated frozensets."""

    kind = "abstract"

    def __init__(self, size: int, labels: Iterable[str] | None = None):
        self.ground = GroundSet(int(size), tuple(labels) if labels is not None else None)
        self._cache: dict[frozenset[int], int] = {}
        self._lock = threading.Lock()

    @property
    def size(self) -> int:
        return self.ground.size

    @abstractmethod
    def _rank(self, s: frozenset[int]) -> int:
        ...

    @abstractmethod
    def to_dict(self) -> dict:
        ...

    def rank(self, s: Iterable[int] | None = None) -> int:
        fs = as_subset(s, self.size)
        cached = self._cache.get(fs)
        if cached is not None:
            return cached
        r = self._rank(fs)
        with self._lock:
            if len(self._cache) > 200_000:
                self._cache.clear()
            self._cache[fs] = r
        return r

    def full_rank(self) -> int:
        return self.rank(range(self.size))

    def is_independent(self, s: Iterable[int]) -> bool:
        fs = as_subset(s, self.size)
        return self.rank(fs) == len(fs)

    def in_span(self, e: int, s: Iterable[int]) -> bool:
        fs = as_subset(s, self.size)
        if e in fs:
            return True
        return self.rank(fs | {e}) == self.rank(fs)

    def span(self, s: Iterable[int] | None = None) -> frozenset[int]:
        fs = as_subset(s, self.size)
        r = self.rank(fs)
        return fs | frozenset(e for e in range(self.size) if e not in fs and self.rank(fs | {e}) == r)

    def loops(self) -> frozenset[int]:
        return frozenset(e for e in range(self.size) if self.rank({e}) == 0)

    def restrict(self, subset: Iterable[int]) -> "Matroid":
        from .families import Restriction

        return Restriction(self, subset)

    def partition_structure(self) -> PartitionStructure | None:
        """Return the block form of this matroid when it is a partition matroid, else None."""
        return None

    def rank_batch(self, masks: np.ndarray) -> np.ndarray:
        """Rank of each row of a boolean ``(N, size)`` matrix."""
        masks = np.asarray(masks, dtype=bool)
        ps = self.partition_structure()
        if ps is not None:
            counts = masks.astype(np.int64) @ ps.onehot()
            return np.minimum(counts, ps.capacity).sum(axis=1)
        return np.array([self.rank(np.flatnonzero(row).tolist()) for row in masks], dtype=np.int64)

    def girth(self) -> float:
        """Size of the smallest dependent set; ``math.inf`` for a free matroid."""
        return self._girth_enumerate()

    def _girth_enumerate(self) -> float:
        if self.size > GIRTH_ENUM_LIMIT:
            raise CapabilityError(
                f"generic girth enumeration is limited to {GIRTH_ENUM_LIMIT} elements (got {self.size})")
        if self.full_rank() == self.size:
            return math.inf
        for c in range(1, self.size + 1):
            for combo in itertools.combinations(range(self.size), c):
                if self.rank(combo) < c:
                    return c
        return math.inf  # pragma: no cover

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.size})"


def all_subsets(n: int):
    """Every subset of ``range(n)`` as a frozenset, in bitmask order."""
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)
