"""Concrete matroid families: uniform, graphic, partition, explicit, restriction."""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from ..errors import InputError
from .base import Matroid, PartitionStructure, as_subset


class UniformMatroid(Matroid):
    """Every set of at most ``k`` elements is independent."""

    kind = "uniform"

    def __init__(self, n: int, k: int, labels=None):
        if n < 0 or k < 0:
            raise InputError("uniform matroid needs n >= 0 and k >= 0")
        super().__init__(n, labels)
        self.k = int(k)

    def _rank(self, s):
        return min(self.k, len(s))

    def partition_structure(self):
        return PartitionStructure(np.zeros(self.size, dtype=np.int64), np.array([self.k], dtype=np.int64))

    def girth(self):
        return self.k + 1 if self.size > self.k else math.inf

    def to_dict(self):
        return {"kind": "uniform", "n": self.size, "k": self.k}


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; element ``i`` is edge ``edges[i]``."""

    kind = "graphic"

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]], labels=None):
        edges = [(int(u), int(v)) for u, v in edges]
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise InputError(f"edge ({u}, {v}) references a vertex outside 0..{num_vertices - 1}")
        super().__init__(len(edges), labels)
        self.num_vertices = int(num_vertices)
        self.edges = edges
        self.eu = np.array([u for u, _ in edges], dtype=np.int64)
        self.ev = np.array([v for _, v in edges], dtype=np.int64)

    def _rank(self, s):
        uf = _UnionFind(self.num_vertices)
        return sum(1 for e in s if uf.union(*self.edges[e]))

    def components(self, s: Iterable[int]) -> list[int]:
        uf = _UnionFind(self.num_vertices)
        for e in as_subset(s, self.size):
            uf.union(*self.edges[e])
        return [uf.find(v) for v in range(self.num_vertices)]

    def girth(self):
        return graph_girth(self.num_vertices, self.edges)

    def to_dict(self):
        return {"kind": "graphic", "num_vertices": self.num_vertices, "edges": [list(e) for e in self.edges]}


def graph_girth(num_vertices: int, edges: Sequence[tuple[int, int]]) -> float:
    """Length of the shortest cycle of a multigraph (loops count 1, parallel pairs 2)."""
    if any(u == v for u, v in edges):
        return 1
    seen = set()
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            return 2
        seen.add(key)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(num_vertices)]
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    best = math.inf
    for root in range(num_vertices):
        dist = [-1] * num_vertices
        via = [-1] * num_vertices
        dist[root] = 0
        queue = deque([root])
        while queue:
            a = queue.popleft()
            if 2 * dist[a] >= best:
                break
            for b, eid in adj[a]:
                if eid == via[a]:
                    continue
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    via[b] = eid
                    queue.append(b)
                else:
                    best = min(best, dist[a] + dist[b] + 1)
    return best


class PartitionMatroid(Matroid):
    """Blocks partition the ground set; at most ``capacities[j]`` elements from block j."""

    kind = "partition"

    def __init__(self, blocks: Sequence[Sequence[int]], capacities: Sequence[int], labels=None):
        blocks = [sorted(int(e) for e in b) for b in blocks]
        if len(blocks) != len(capacities):
            raise InputError("one capacity per block is required")
        flat = sorted(e for b in blocks for e in b)
        if flat != list(range(len(flat))):
            raise InputError("partition blocks must cover 0..n-1 exactly once")
        if any(c < 0 for c in capacities):
            raise InputError("capacities must be >= 0")
        super().__init__(len(flat), labels)
        self.blocks = blocks
        self.capacities = [int(c) for c in capacities]
        block_of = np.empty(self.size, dtype=np.int64)
        for j, b in enumerate(blocks):
            block_of[b] = j
        self._ps = PartitionStructure(block_of, np.array(self.capacities, dtype=np.int64))

    def _rank(self, s):
        return self._ps.rank(s)

    def partition_structure(self):
        return self._ps

    def to_dict(self):
        return {"kind": "partition", "blocks": [list(b) for b in self.blocks], "capacities": list(self.capacities)}


class ExplicitMatroid(Matroid):
    """Matroid given by a generating list of independent sets (closed downward).

    The list is normalised (each set sorted, duplicates and sets contained in
    another listed set removed) so equal matroids serialise identically.
    """

    kind = "explicit"

    def __init__(self, n: int, independent_sets: Iterable[Iterable[int]], labels=None, validate: bool = True):
        super().__init__(n, labels)
        sets = {as_subset(s, n) for s in independent_sets}
        sets.add(frozenset())
        maximal = [s for s in sets if not any(s < t for t in sets)]
        self.independent_sets = sorted((tuple(sorted(s)) for s in maximal), key=lambda t: (len(t), t))
        self._sets = [frozenset(s) for s in self.independent_sets]
        if validate and n <= 12:
            self._check_exchange()

    def _rank(self, s):
        return max(len(s & t) for t in self._sets)

    def _check_exchange(self):
        # The stored maximal sets must be the bases of a matroid.
        bases = set(self._sets)
        if len({len(t) for t in bases}) > 1:
            raise InputError("explicit family is not a matroid: maximal sets differ in size")
        for a in bases:
            for b in bases:
                for x in a - b:
                    if not any((a - {x}) | {y} in bases for y in b - a):
                        raise InputError("explicit family is not a matroid: basis exchange fails")

    def to_dict(self):
        return {"kind": "explicit", "n": self.size, "independent_sets": [list(s) for s in self.independent_sets]}


class Restriction(Matroid):
    """Restriction of ``parent`` to ``subset``, re-indexed densely in increasing parent order."""

    kind = "restriction"

    def __init__(self, parent: Matroid, subset: Iterable[int]):
        members = tuple(sorted(as_subset(subset, parent.size)))
        labels = None
        if parent.ground.labels is not None:
            labels = [parent.ground.labels[e] for e in members]
        super().__init__(len(members), labels)
        self.parent = parent
        self.members = members
        self._local = {e: i for i, e in enumerate(members)}

    def to_parent(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self.members[i] for i in as_subset(s, self.size))

    def from_parent(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset(self._local[e] for e in s)

    def _rank(self, s):
        return self.parent.rank(frozenset(self.members[i] for i in s))

    def partition_structure(self):
        ps = self.parent.partition_structure()
        if ps is None:
            return None
        idx = np.array(self.members, dtype=np.int64)
        return PartitionStructure(ps.block[idx] if idx.size else np.zeros(0, dtype=np.int64), ps.capacity)

    def girth(self):
        if isinstance(self.parent, GraphicMatroid):
            return graph_girth(self.parent.num_vertices, [self.parent.edges[e] for e in self.members])
        return super().girth()

    def to_dict(self):
        return {"kind": "restriction", "parent": self.parent.to_dict(), "subset": list(self.members)}


def edge_view(m: Matroid):
    """``(num_vertices, eu, ev)`` when ``m`` is graphic or a restriction of a graphic matroid, else None."""
    if isinstance(m, GraphicMatroid):
        return m.num_vertices, m.eu, m.ev
    if isinstance(m, Restriction):
        inner = edge_view(m.parent)
        if inner is None:
            return None
        idx = np.array(m.members, dtype=np.int64)
        return inner[0], inner[1][idx], inner[2][idx]
    return None
