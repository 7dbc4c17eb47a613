"""Expectations of occupancy functions under random active sets.

Three ways to get ``E[occ_e(R(x) ∪ S)]`` for every candidate base element e:

* ``exact``: enumerate every outcome of the active set (support ≤ 20);
* ``analytic``: closed form for partition-structured extended unions, from the
  Poisson-binomial laws of the active counts inside e's block;
* ``monte-carlo``: sample the active set, with a Hoeffding radius
  ``sqrt(k^2 ln(2/delta) / (2N))`` for the [0, k]-valued occupancy.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import CapabilityError, InputError
from ..matroids.families import edge_view
from ..matroids.union import ExtendedKFoldUnion
from ..stats import hoeffding_radius
from ..streams import map_chunks, substream

MODES = ("auto", "exact", "analytic", "monte-carlo")
POLICIES = ("raise", "conservative")
EXACT_LIMIT = 20


@dataclass(frozen=True)
class Estimate:
    values: dict[int, float]
    radius: float
    mode: str
    samples: int


def poisson_binomial(probs) -> np.ndarray:
    """pmf of a sum of independent Bernoulli(p_i)."""
    pmf = np.array([1.0])
    for p in probs:
        nxt = np.zeros(pmf.shape[0] + 1)
        nxt[:-1] += pmf * (1.0 - p)
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


@dataclass
class ExpectationEstimator:
    mode: str = "auto"
    samples: int = 4000
    delta: float = 1e-3
    policy: str = "raise"
    max_samples: int = 64000
    seed: int = 0
    threads: int = 1
    backend: str | None = None
    auto_exact_limit: int = 12
    chunk: int = 2000
    _pb_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"estimator mode must be one of {MODES}")
        if self.policy not in POLICIES:
            raise InputError(f"indeterminate policy must be one of {POLICIES}")
        if self.samples < 1 or self.max_samples < self.samples:
            raise InputError("need 1 <= samples <= max_samples")
        if not 0 < self.delta < 1:
            raise InputError("delta must lie in (0, 1)")

    def resolve_mode(self, mk: ExtendedKFoldUnion, x: np.ndarray) -> str:
        support = int(np.count_nonzero(x))
        if self.mode == "exact":
            if support > EXACT_LIMIT:
                raise CapabilityError(f"exact enumeration needs support <= {EXACT_LIMIT} (got {support})")
            return "exact"
        if self.mode == "analytic":
            if mk.partition_structure() is None:
                raise CapabilityError("analytic expectations need a partition-structured matroid")
            return "analytic"
        if self.mode == "monte-carlo":
            return "monte-carlo"
        if mk.partition_structure() is not None:
            return "analytic"
        if support <= self.auto_exact_limit:
            return "exact"
        return "monte-carlo"

    def occupancy_means(self, mk: ExtendedKFoldUnion, x, S, candidates, *, level: int = 0,
                        samples: int | None = None, attempt: int = 0) -> Estimate:
        x = np.asarray(x, dtype=float)
        S = frozenset(S)
        candidates = list(candidates)
        mode = self.resolve_mode(mk, x)
        if mode == "exact":
            return Estimate(_exact(mk, x, S, candidates), 0.0, mode, 0)
        if mode == "analytic":
            return Estimate(self._analytic(mk, x, S, candidates), 0.0, mode, 0)
        n = samples or self.samples
        values = self._monte_carlo(mk, x, S, candidates, n, level, attempt)
        return Estimate(values, hoeffding_radius(mk.k, n, self.delta), mode, n)

    def _analytic(self, mk, x, S, candidates):
        ps = mk.partition_structure()
        k = mk.k
        in_s = np.zeros(mk.size, dtype=bool)
        in_s[list(S)] = True
        live = (x > 0) & ~in_s
        block_stats = {}
        out = {}
        for e in candidates:
            group = np.array(sorted(mk.group(e)), dtype=np.int64)
            beta = int(ps.block[group[0]])
            if beta not in block_stats:
                members = ps.block == beta
                block_stats[beta] = (int((members & in_s).sum()), np.sort(x[members & live]))
            s, block_x = block_stats[beta]
            gx = np.sort(x[group][live[group]])
            # Remove e's own copies from the block multiset to get the law of the other actives.
            rest = list(block_x)
            for v in gx:
                rest.remove(v)
            key = tuple(rest)
            pmf_x = self._pb_cache.get(key)
            if pmf_x is None:
                pmf_x = self._pb_cache.setdefault(key, poisson_binomial(rest))
            pmf_y = poisson_binomial(gx)
            cap = int(ps.capacity[beta])
            xs = np.arange(pmf_x.shape[0])[:, None]
            ys = np.arange(pmf_y.shape[0])[None, :]
            occ = k - np.minimum(cap, s + xs + k) + np.minimum(cap, s + xs + ys)
            out[e] = float(pmf_x @ occ @ pmf_y)
        return out

    def _monte_carlo(self, mk, x, S, candidates, n, level, attempt):
        support = np.flatnonzero(x > 0)
        xs = x[support]
        view = edge_view(mk.base) if mk.k == 1 else None
        s_idx = sorted(S)

        if view is not None:
            nv, eu, ev = view
            init = kernels.forest_parent(nv, eu, ev, s_idx)

            def run(c, rows):
                rng = substream(self.seed, "estimator", level, f"a{attempt}c{c}")
                present = np.zeros((rows, mk.size), dtype=np.uint8)
                present[:, support] = rng.random((rows, support.shape[0])) < xs
                return kernels.graphic_span_counts(eu, ev, init, present, backend=self.backend)

            counts = sum(map_chunks(run, n, self.threads, self.chunk))
            return {e: float(counts[e]) / n for e in candidates}

        groups = {e: sorted(mk.group(e)) for e in candidates}

        def run(c, rows):
            rng = substream(self.seed, "estimator", level, f"a{attempt}c{c}")
            masks = np.zeros((rows, mk.size), dtype=bool)
            masks[:, support] = rng.random((rows, support.shape[0])) < xs
            masks[:, s_idx] = True
            base = mk.rank_batch(masks)
            tot = {}
            for e, g in groups.items():
                with_g = masks.copy()
                with_g[:, g] = True
                tot[e] = int((mk.k - mk.rank_batch(with_g) + base).sum())
            return tot

        parts = map_chunks(run, n, self.threads, self.chunk)
        return {e: sum(p[e] for p in parts) / n for e in candidates}


def _exact(mk, x, S, candidates):
    support = [int(i) for i in np.flatnonzero(x > 0) if i not in S]
    if len(support) > EXACT_LIMIT:
        raise CapabilityError(f"exact enumeration needs support <= {EXACT_LIMIT} (got {len(support)})")
    k = mk.k
    out = {e: 0.0 for e in candidates}
    groups = {e: mk.group(e) for e in candidates}
    for bits in itertools.product((0, 1), repeat=len(support)):
        prob = 1.0
        chosen = []
        for i, bit in zip(support, bits):
            if bit:
                prob *= x[i]
                chosen.append(i)
            else:
                prob *= 1.0 - x[i]
        if prob == 0.0:
            continue
        T = S | frozenset(chosen)
        r = mk.rank(T)
        for e, g in groups.items():
            out[e] += prob * (k - mk.rank(T | g) + r)
    return out
