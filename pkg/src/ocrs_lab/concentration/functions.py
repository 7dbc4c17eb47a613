"""Monotone 1-Lipschitz test functions evaluated on batches of binary vectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import InputError
from ..matroids.base import Matroid
from ..matroids.families import edge_view
from ..matroids.union import ExtendedKFoldUnion, occupancy_batch


class SetFunction:
    """Batched evaluator: ``evaluate(X)`` maps a boolean ``(T, dim)`` matrix to ``(T,)`` values."""

    name = "abstract"
    dim: int
    range_bound: float

    def evaluate(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=bool))
        if X.shape[1] != self.dim:
            raise InputError(f"{self.name} expects {self.dim} coordinates, got {X.shape[1]}")
        return self.evaluate(X)


class CappedSum(SetFunction):
    name = "capped-sum"

    def __init__(self, dim: int, cap: int):
        self.dim, self.cap = int(dim), int(cap)
        self.range_bound = float(min(cap, dim))

    def evaluate(self, X):
        return np.minimum(self.cap, X.sum(axis=1)).astype(float)


class CoordinateMax(SetFunction):
    name = "max"

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.range_bound = 1.0

    def evaluate(self, X):
        return X.any(axis=1).astype(float)


class MatroidRank(SetFunction):
    """Unit-weight rank of the set of ones."""

    name = "matroid-rank"

    def __init__(self, m: Matroid):
        self.m = m
        self.dim = m.size
        self.range_bound = float(m.full_rank())

    def evaluate(self, X):
        view = edge_view(self.m)
        if self.m.partition_structure() is None and view is not None:
            nv, eu, ev = view
            order = np.tile(np.arange(self.dim, dtype=np.int64), (X.shape[0], 1))
            acc = kernels.level_greedy_graphic(eu, ev, np.zeros(self.dim, dtype=np.int64),
                                               np.arange(nv, dtype=np.int64)[None, :], order, X)
            return acc.sum(axis=1).astype(float)
        return self.m.rank_batch(X).astype(float)


class OccupancyDerived(SetFunction):
    """f(S) = occ_e(S ∪ N) over the coordinates ``coords`` of an extended k-fold union."""

    name = "occupancy"

    def __init__(self, mk: ExtendedKFoldUnion, e: int, protected=(), coords=None):
        self.mk, self.e = mk, int(e)
        self.protected = np.array(sorted(protected), dtype=np.int64)
        self.coords = np.arange(mk.size, dtype=np.int64) if coords is None else np.asarray(coords, dtype=np.int64)
        self.dim = int(self.coords.shape[0])
        self.range_bound = float(mk.k)
        ps = mk.partition_structure()
        group = np.array(sorted(mk.group(self.e)), dtype=np.int64)
        self._fast = None
        if ps is not None:
            beta = int(ps.block[group[0]])
            in_block = ps.block[self.coords] == beta
            in_prot = np.isin(self.coords, self.protected)
            in_group = np.isin(self.coords, group) & ~in_prot
            in_block &= ~in_prot
            fixed_block = int(np.count_nonzero(ps.block[self.protected] == beta)) if self.protected.size else 0
            fixed_group = int(np.count_nonzero(np.isin(self.protected, group)))
            self._fast = (in_block & ~in_group, in_group, fixed_block - fixed_group, fixed_group,
                          int(ps.capacity[beta]))

    def evaluate(self, X):
        k = self.mk.k
        if self._fast is not None:
            other, own, fixed_other, fixed_own, cap = self._fast
            a = X[:, other].sum(axis=1) + fixed_other
            y = X[:, own].sum(axis=1) + fixed_own
            return (k - np.minimum(cap, a + k) + np.minimum(cap, a + y)).astype(float)
        masks = np.zeros((X.shape[0], self.mk.size), dtype=bool)
        masks[:, self.coords] = X
        if self.protected.size:
            masks[:, self.protected] = True
        return occupancy_batch(self.mk, self.e, masks).astype(float)


@dataclass
class SpotCheck:
    monotone_violations: int
    lipschitz_violations: int
    pairs: int
    flips: int

    @property
    def ok(self) -> bool:
        return self.monotone_violations == 0 and self.lipschitz_violations == 0


def spot_check(f: SetFunction, p, rng: np.random.Generator, pairs: int = 10_000, flips: int = 10_000,
               batch: int = 2000) -> SpotCheck:
    """Random x ≤ y pairs for monotonicity, random single-coordinate flips for 1-Lipschitzness."""
    p = np.broadcast_to(np.asarray(p, dtype=float), (f.dim,))
    mono = lip = 0
    done = 0
    while done < pairs:
        rows = min(batch, pairs - done)
        x = rng.random((rows, f.dim)) < p
        y = x | (rng.random((rows, f.dim)) < rng.random((rows, 1)))
        mono += int(np.count_nonzero(f(x) > f(y) + 1e-12))
        done += rows
    done = 0
    while done < flips:
        rows = min(batch, flips - done)
        x = rng.random((rows, f.dim)) < p
        y = x.copy()
        j = rng.integers(0, f.dim, rows)
        y[np.arange(rows), j] ^= True
        lip += int(np.count_nonzero(np.abs(f(x) - f(y)) > 1 + 1e-12))
        done += rows
    return SpotCheck(mono, lip, pairs, flips)


def occupancy_instance(k: int = 100, base_elements: int = 4, capacity: int = 2, p: float = 0.35):
    """Occupancy of element 0 in the extended k-fold union of a one-block partition matroid.

    Every copy of every element is a coordinate with activation probability ``p``.
    """
    from ..matroids.families import PartitionMatroid

    base = PartitionMatroid([list(range(base_elements))], [capacity])
    mk = ExtendedKFoldUnion(base, k)
    f = OccupancyDerived(mk, 0)
    return f, np.full(f.dim, p)
