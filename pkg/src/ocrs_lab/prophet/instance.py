"""Prophet instances, offline optimum and online gamblers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import kernels
from ..errors import InputError, InvariantError
from ..matroids import schema
from ..matroids.base import Matroid
from ..matroids.families import UniformMatroid, edge_view
from ..matroids.union import UnionMatroid
from .distributions import DiscreteDistribution, ValueTable

SCHEMA_VERSION = 1


@dataclass
class ProphetInstance:
    matroid: Matroid
    dists: list[DiscreteDistribution]
    order: list[int]

    def __post_init__(self):
        n = self.matroid.size
        if len(self.dists) != n:
            raise InputError(f"need one distribution per element ({n}), got {len(self.dists)}")
        if sorted(self.order) != list(range(n)):
            raise InputError("arrival order must be a permutation of the elements")
        self.table = ValueTable(self.dists) if n else None

    @property
    def size(self) -> int:
        return self.matroid.size

    def sample_values(self, u: np.ndarray) -> np.ndarray:
        return self.table.sample(u)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "matroid": schema.to_dict(self.matroid, top=False),
            "distributions": [d.to_list() for d in self.dists],
            "order": list(self.order),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProphetInstance":
        if not isinstance(d, dict):
            raise InputError("instance must be a mapping")
        extra = set(d) - {"schema_version", "matroid", "distributions", "order", "order_policy"}
        if extra:
            raise InputError(f"unknown instance fields: {sorted(extra)}")
        if d.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise InputError("unsupported instance schema_version")
        try:
            m = schema.from_dict(d["matroid"])
            dists = [DiscreteDistribution.of(pairs) for pairs in d["distributions"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed instance: {exc}") from exc
        order = d.get("order")
        if order is None:
            policy = d.get("order_policy", "index")
            if policy == "index":
                order = list(range(m.size))
            elif policy == "reverse":
                order = list(range(m.size))[::-1]
            else:
                raise InputError(f"unknown order policy {policy!r}")
        return cls(m, dists, [int(e) for e in order])

    @classmethod
    def load(cls, path: str | Path) -> "ProphetInstance":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read instance {path}: {exc}") from exc
        return cls.from_dict(data)


def kfold_view(m: Matroid) -> tuple[Matroid, int]:
    """Write ``m`` as the k-fold union of a base when it visibly is one, else as a 1-fold union."""
    if isinstance(m, UnionMatroid) and m.is_kfold:
        return m.base, m.k
    if isinstance(m, UniformMatroid) and m.k > 1:
        return UniformMatroid(m.size, 1), m.k
    return m, 1


def online_greedy(m: Matroid, order: np.ndarray, cand: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Accept each candidate, in the given per-row order, iff it keeps the accepted set independent."""
    T, n = cand.shape
    level = np.zeros(n, dtype=np.int64)
    ps = m.partition_structure()
    if ps is not None:
        return kernels.level_greedy_partition(ps.block, level, np.zeros((1, ps.n_blocks), dtype=np.int64),
                                              ps.capacity, order, cand, backend=backend)
    view = edge_view(m)
    if view is not None:
        nv, eu, ev = view
        init = np.arange(nv, dtype=np.int64)[None, :]
        return kernels.level_greedy_graphic(eu, ev, level, init, order, cand, backend=backend)
    acc = np.zeros((T, n), dtype=np.uint8)
    for t in range(T):
        chosen: list[int] = []
        for e in order[t]:
            if cand[t, e] and m.rank(chosen + [int(e)]) == len(chosen) + 1:
                chosen.append(int(e))
                acc[t, e] = 1
    return acc


def offline_opt_batch(m: Matroid, values: np.ndarray, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Max-weight independent set per row by greedy in decreasing value (ties by index)."""
    order = np.argsort(-values, axis=1, kind="stable")
    acc = online_greedy(m, order, values > 0, backend)
    return (values * acc).sum(axis=1), acc


def offline_opt(inst: ProphetInstance, values: Sequence[float]) -> tuple[float, frozenset[int]]:
    v = np.asarray(values, dtype=float)[None, :]
    if np.any(~np.isfinite(v)) or np.any(v < 0):
        raise InputError("values must be finite and >= 0")
    total, acc = offline_opt_batch(inst.matroid, v)
    return float(total[0]), frozenset(np.flatnonzero(acc[0]).tolist())


@dataclass(frozen=True)
class GamblerSpec:
    """``greedy-threshold`` (param = threshold), ``accept-all-feasible`` or ``ocrs-reduction``."""

    kind: str
    threshold: float = math.inf

    @property
    def label(self) -> str:
        if self.kind == "greedy-threshold":
            return f"greedy-threshold({self.threshold:g})"
        return self.kind


def threshold_gambler(inst: ProphetInstance, values: np.ndarray, t: float, backend=None) -> np.ndarray:
    order = np.tile(np.asarray(inst.order, dtype=np.int64), (values.shape[0], 1))
    cand = (values >= t) & (values > 0)
    acc = online_greedy(inst.matroid, order, cand, backend)
    return acc


def accept_all_gambler(inst: ProphetInstance, values: np.ndarray, backend=None) -> np.ndarray:
    return threshold_gambler(inst, values, 0.0, backend)


def check_feasible(m: Matroid, acc: np.ndarray, backend=None) -> None:
    """Greedy re-insertion in index order keeps every accepted element iff each row is independent."""
    T, n = acc.shape
    order = np.tile(np.arange(n, dtype=np.int64), (T, 1))
    again = online_greedy(m, order, acc.astype(bool), backend)
    if not np.array_equal(again.astype(bool), acc.astype(bool)):
        raise InvariantError("a gambler accepted a dependent set")
