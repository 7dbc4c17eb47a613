"""Turning the OCRS into a prophet gambler.

The marginals are the empirical frequencies ``x_e`` with which each element
lies in the offline optimum over ``M`` sampled realizations.  Those sampled
optimal sets, each weighted 1/M, are themselves an exact certificate that x
lies in the matroid polytope.  An element is active when its value clears the
x_e-quantile of its distribution (atoms split by an independent uniform); the
OCRS then runs on the shrunk vector b*x.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, InvariantError
from ..matroids.union import ExtendedKFoldUnion
from ..ocrs.engine import LayeredPlan, keep_probability
from ..ocrs.estimator import ExpectationEstimator
from ..ocrs.marginals import MarginalVector, default_b
from ..ocrs.protection import ChainDecomposition, build_chain
from ..streams import map_chunks, substream
from .instance import ProphetInstance, kfold_view, offline_opt_batch


@dataclass
class ReductionPolicy:
    inst: ProphetInstance
    k: int
    mk: ExtendedKFoldUnion
    x: np.ndarray
    marginals: MarginalVector
    b: float
    chain: ChainDecomposition
    tau: np.ndarray
    q: np.ndarray
    plan: LayeredPlan

    @property
    def keep(self) -> float:
        return keep_probability(self.b, downsample=True, shrink=self.b)

    def active(self, values: np.ndarray, u_tie: np.ndarray) -> np.ndarray:
        return (values > self.tau) | ((values == self.tau) & (u_tie < self.q))

    def accept(self, values: np.ndarray, u_tie: np.ndarray, u_gate: np.ndarray) -> np.ndarray:
        """Acceptance matrix over base elements for one block of realizations."""
        T = values.shape[0]
        base_support = self.plan.support // self.k
        cand = (self.active(values, u_tie) & (u_gate < self.keep))[:, base_support]
        pos = {int(e): i for i, e in enumerate(base_support)}
        seq = np.array([pos[e] for e in self.inst.order if e in pos], dtype=np.int64)
        acc_support = self.plan.run(np.tile(seq, (T, 1)), cand)
        acc = np.zeros(values.shape, dtype=np.uint8)
        acc[:, base_support] = acc_support
        return acc

    def summary(self) -> dict:
        return {
            "k": self.k,
            "b": self.b,
            "keep_probability": self.keep,
            "certificate_sets": len(self.marginals.certificate),
            "chain": self.chain.summary(),
        }


def estimate_marginals(inst: ProphetInstance, samples: int, seed: int, threads: int = 1, backend=None):
    """Frequencies of membership in the offline optimum, plus the distinct optimal sets and their counts."""
    if samples < 1:
        raise InputError("marginal estimation needs at least one sample")

    def run(c, rows):
        u = substream(seed, "reduction-values", c).random((rows, inst.size))
        _, acc = offline_opt_batch(inst.matroid, inst.sample_values(u), backend)
        return Counter(tuple(np.flatnonzero(row).tolist()) for row in acc)

    counts = Counter()
    for part in map_chunks(run, samples, threads):
        counts.update(part)
    x = np.zeros(inst.size)
    for s, c in counts.items():
        x[list(s)] += c
    return x / samples, counts


def ocrs_to_prophet(inst: ProphetInstance, *, samples: int = 2000, b: float | None = None,
                    estimator: ExpectationEstimator | None = None, seed: int = 0, threads: int = 1,
                    backend: str | None = None) -> ReductionPolicy:
    base, k = kfold_view(inst.matroid)
    mk = ExtendedKFoldUnion(base, k)
    x, counts = estimate_marginals(inst, samples, seed, threads, backend)
    keys = sorted(counts)
    sets = [[e * k for e in s] for s in keys]
    weights = [counts[s] / samples for s in keys]
    mv = MarginalVector.from_certificate(mk.size, sets, weights, 1)
    for s in sets:
        if not mk.is_independent(s):
            raise InvariantError("an offline optimum is not independent in the extended union")
    lifted = np.zeros(mk.size)
    lifted[np.arange(inst.size) * k] = x
    if np.max(np.abs(mv.x - lifted), initial=0.0) > 1e-12:
        raise InvariantError("certificate does not reproduce the estimated marginals")
    b = default_b(k) if b is None else float(b)
    if not 0 < b <= 1:
        raise InputError("b must lie in (0, 1]")
    est = estimator or ExpectationEstimator(policy="conservative", seed=seed)
    scaled = mv.shrink(b)
    chain = build_chain(mk, scaled, b, est)
    gates = [inst.dists[e].quantile_gate(float(x[e])) for e in range(inst.size)]
    tau = np.array([g[0] for g in gates])
    q = np.array([g[1] for g in gates])
    plan = LayeredPlan(mk, chain, scaled, backend)
    return ReductionPolicy(inst, k, mk, x, mv, b, chain, tau, q, plan)


def activation_rate(policy: ReductionPolicy, trials: int, seed: int) -> np.ndarray:
    """Empirical Pr[active] per element, for checking the quantile gate."""
    u = substream(seed, "gate-check").random((trials, policy.inst.size))
    ties = substream(seed, "gate-check", 1).random((trials, policy.inst.size))
    values = policy.inst.sample_values(u)
    return policy.active(values, ties).sum(axis=0)
