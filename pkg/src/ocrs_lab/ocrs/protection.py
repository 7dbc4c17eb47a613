"""Protection sets and the chain decomposition.

Both protection loops scan candidates from the lowest index and restart the
scan after every insertion, so the result depends only on the instance, the
estimator and its seed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from ..errors import ContractViolation, IndeterminateComparisonError, InvariantError
from ..matroids.base import Matroid, as_subset
from ..matroids.union import ExtendedKFoldUnion
from .estimator import ExpectationEstimator
from .marginals import MarginalVector

EXACT_SLACK = 1e-9


def modified_greedy_step(m: Matroid, protected: Iterable[int], accepted: Iterable[int], e: int) -> bool:
    """Accept ``e`` iff it is outside span(accepted ∪ protected)."""
    S = as_subset(protected, m.size)
    if e in S:
        raise ContractViolation(f"element {e} belongs to the protection set")
    A = as_subset(accepted, m.size)
    return not m.in_span(e, A | S)


@dataclass
class ProtectReport:
    level: int
    mode: str
    rounds: int = 0
    samples: int = 0
    radius: float = 0.0
    min_margin: float = float("inf")
    conservative_skips: int = 0
    escalations: int = 0
    added: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["min_margin"] == float("inf"):
            d["min_margin"] = None
        return d


def _x_array(x, size):
    arr = x.x if isinstance(x, MarginalVector) else np.asarray(x, dtype=float)
    if arr.shape[0] != size:
        raise ContractViolation(f"marginal vector has {arr.shape[0]} entries, matroid has {size}")
    return arr


def kfold_protect(mk: ExtendedKFoldUnion, x, b: float, est: ExpectationEstimator,
                  level: int = 0) -> tuple[frozenset[int], ProtectReport]:
    """Grow S = S0 x [k] while some e outside S0 has E[occ_e(R(x) ∪ S)] > b k."""
    xs = _x_array(x, mk.size)
    k = mk.k
    threshold = b * k
    n_base = mk.base.size
    S0: list[int] = []
    taken: set[int] = set()
    S: frozenset[int] = frozenset()
    samples = est.samples
    attempt = 0
    report = ProtectReport(level=level, mode=est.resolve_mode(mk, xs))
    # loops span nothing and are never selected, so they are left out of S
    taken.update(mk.base.loops())
    while True:
        remaining = [e for e in range(n_base) if e not in taken]
        if not remaining:
            break
        estimate = est.occupancy_means(mk, xs, S, remaining, level=level, samples=samples, attempt=attempt)
        report.rounds += 1
        report.samples = max(report.samples, estimate.samples)
        report.radius = max(report.radius, estimate.radius)
        eps = estimate.radius
        chosen = None
        restart = False
        for e in remaining:
            v = estimate.values[e]
            margin = v - threshold
            if eps == 0.0:
                if margin > EXACT_SLACK:
                    chosen = e
                    break
                report.min_margin = min(report.min_margin, abs(margin))
                continue
            if margin - eps > 0:
                chosen = e
                break
            if margin + eps < 0:
                report.min_margin = min(report.min_margin, abs(margin))
                continue
            if est.policy == "conservative":
                report.conservative_skips += 1
                report.min_margin = min(report.min_margin, abs(margin))
                continue
            if samples * 2 <= est.max_samples:
                samples *= 2
                attempt += 1
                report.escalations += 1
                restart = True
                break
            raise IndeterminateComparisonError(
                f"E[occ_{e}] = {v:.6f} is within ±{eps:.6f} of b*k = {threshold:.6f} at level {level}",
                element=e, estimate=v, threshold=threshold, radius=eps)
        if restart:
            continue
        if chosen is None:
            break
        S0.append(chosen)
        taken.add(chosen)
        report.added.append(chosen)
        S = S | mk.group(chosen)
    if len(S) == mk.size and mk.size > 0:
        raise InvariantError("protection returned the whole ground set")
    return S, report


def protect(m: Matroid, x, b: float, est: ExpectationEstimator, level: int = 0) -> tuple[frozenset[int], ProtectReport]:
    """Grow S while some e outside S has Pr[e in span(R(x) ∪ S)] > b (the k = 1 case of the above)."""
    return kfold_protect(ExtendedKFoldUnion(m, 1), x, b, est, level)


@dataclass
class ChainDecomposition:
    """Levels N_0 ⊋ N_1 ⊋ ... ⊋ N_l = ∅ over the extended ground set."""

    levels: list[frozenset[int]]
    reports: list[ProtectReport]
    k: int

    @property
    def length(self) -> int:
        return len(self.levels) - 1

    def level_of(self, idx: int) -> int:
        for j in range(self.length):
            if idx in self.levels[j] and idx not in self.levels[j + 1]:
                return j
        raise InvariantError(f"element {idx} lies in no level gap")

    def level_array(self, size: int) -> np.ndarray:
        out = np.full(size, -1, dtype=np.int64)
        for j in range(self.length - 1, -1, -1):
            out[list(self.levels[j])] = j
        return out

    def summary(self) -> dict:
        return {
            "length": self.length,
            "level_sizes": [len(s) for s in self.levels],
            "protect": [r.to_dict() for r in self.reports],
            "estimation_slack": sum(r.radius for r in self.reports),
        }


def build_chain(mk: ExtendedKFoldUnion, x, b: float, est: ExpectationEstimator) -> ChainDecomposition:
    xs = _x_array(x, mk.size)
    full = frozenset(range(mk.size))
    levels = [full]
    reports = []
    current = list(range(mk.base.size))
    j = 0
    while levels[-1]:
        if len(current) == mk.base.size:
            sub, mapping = mk, list(range(mk.size))
        else:
            sub, mapping = mk.restrict_groups(current)
        local_S, report = kfold_protect(sub, xs[mapping], b, est, level=j)
        S = frozenset(mapping[i] for i in local_S)
        if not S < levels[-1]:
            raise InvariantError(f"chain level {j + 1} is not strictly nested")
        if not mk.is_group_union(S):
            raise InvariantError(f"chain level {j + 1} is not a union of copy groups")
        levels.append(S)
        reports.append(report)
        current = sorted(mk.project(S))
        j += 1
    return ChainDecomposition(levels, reports, mk.k)
