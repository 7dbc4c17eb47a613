"""The high-girth instance: every edge of G is split into a two-edge path through a new vertex.

For G with vertices w_0..w_{n-1} and edges (a_i, b_i), H adds vertices
u_i = n + i and the edges f_i = (u_i, w_{a_i}) at index 2i and
f'_i = (u_i, w_{b_i}) at index 2i+1.  f_i is worth 1 for sure; f'_i is worth
1/eps with probability eps and 0 otherwise.  Edges arrive f_1, f'_1, f_2, ...
An online algorithm that takes both edges of a pair commits a path between
w_a and w_b, and such pairs always form a forest of G, hence at most n-1 of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError, InvariantError
from ..graphs import Graph
from ..matroids.families import GraphicMatroid, graph_girth
from ..ocrs.estimator import ExpectationEstimator
from .distributions import DiscreteDistribution
from .harness import RatioReport, best_ratio, run_policies
from .instance import GamblerSpec, ProphetInstance
from .reduction import ocrs_to_prophet


@dataclass
class HardGirthInstance:
    source: Graph
    eps: float
    girth_source: float
    girth_split: float
    instance: ProphetInstance

    @property
    def n(self) -> int:
        return self.source[0]

    @property
    def m(self) -> int:
        return len(self.source[1])

    def opt_lower_bound(self) -> float:
        """Expected value of taking the heavier edge of every pair: m(2 - eps)."""
        return self.m * (2.0 - self.eps)

    def online_ceiling(self) -> float:
        """Upper bound m + n(1 + 1/eps) on any online algorithm's expected value."""
        return self.m + self.n * (1.0 + 1.0 / self.eps)

    def ratio_ceiling(self) -> float:
        return self.online_ceiling() / self.opt_lower_bound()

    def double_pairs(self, acc: np.ndarray) -> np.ndarray:
        """Per row, the number of pairs with both edges accepted."""
        acc = np.asarray(acc, dtype=bool)
        return (acc[:, 0::2] & acc[:, 1::2]).sum(axis=1)


def split_graph(g: Graph) -> Graph:
    n, edges = g
    m = len(edges)
    out = []
    for i, (a, b) in enumerate(edges):
        out.append((n + i, a))
        out.append((n + i, b))
    return n + m, out


def build_hard_instance(g: Graph, eps: float) -> HardGirthInstance:
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    n, edges = g
    seen = set()
    for a, b in edges:
        if a == b or (min(a, b), max(a, b)) in seen:
            raise InputError("the source graph must be simple")
        seen.add((min(a, b), max(a, b)))
    h = split_graph(g)
    m = len(edges)
    dists = []
    heavy = DiscreteDistribution((1.0 / eps, 0.0), (eps, 1.0 - eps))
    for _ in range(m):
        dists.append(DiscreteDistribution.point(1.0))
        dists.append(heavy)
    inst = ProphetInstance(GraphicMatroid(*h), dists, list(range(2 * m)))
    g_girth = graph_girth(n, edges)
    h_girth = graph_girth(*h)
    if h_girth != 2 * g_girth:
        raise InvariantError(f"split graph girth {h_girth} is not twice {g_girth}")
    return HardGirthInstance(g, float(eps), g_girth, h_girth, inst)


def default_gamblers(eps: float) -> list[GamblerSpec]:
    return [
        GamblerSpec("accept-all-feasible"),
        GamblerSpec("greedy-threshold", 1.0 / eps),
        GamblerSpec("ocrs-reduction"),
    ]


def girth_lowerbound_report(graphs: Sequence[tuple[str, Graph]], eps: float, trials: int, *, seed: int = 0,
                            gamblers: Sequence[GamblerSpec] | None = None, reduction_samples: int = 2000,
                            estimator_samples: int = 2000, threads: int = 1, backend: str | None = None) -> list[dict]:
    """Measured ratios per (graph, gambler) against the finite-size ceiling (m + n(1+1/eps)) / (m(2-eps))."""
    gamblers = list(gamblers or default_gamblers(eps))
    rows = []
    for gi, (name, g) in enumerate(graphs):
        hard = build_hard_instance(g, eps)
        inst = hard.instance
        reduction = None
        if any(s.kind == "ocrs-reduction" for s in gamblers):
            est = ExpectationEstimator(mode="monte-carlo", samples=estimator_samples, max_samples=estimator_samples,
                                       policy="conservative", seed=seed, threads=threads, backend=backend)
            reduction = ocrs_to_prophet(inst, samples=reduction_samples, estimator=est, seed=seed,
                                        threads=threads, backend=backend)

        def pairs(label, acc):
            return {"max_double_pairs": int(hard.double_pairs(acc).max(initial=0))}

        opt, reports = run_policies(inst, gamblers, trials, seed=seed, reduction=reduction, threads=threads,
                                    backend=backend, on_accept=pairs)
        ceiling = hard.online_ceiling()
        best = best_ratio(reports)
        rows.append({
            "graph": name,
            "eps": eps,
            "n": hard.n,
            "m": hard.m,
            "girth_source": hard.girth_source,
            "girth_split": hard.girth_split,
            "opt_mean": opt["opt_mean"],
            "opt_hw": opt["opt_hw"],
            "opt_lower_bound": hard.opt_lower_bound(),
            "online_ceiling": ceiling,
            "ratio_ceiling": hard.ratio_ceiling(),
            "uninformative": bool(hard.ratio_ceiling() >= 1.0),
            "reports": {k: v.to_dict() for k, v in reports.items()},
            "best_policy": best.policy,
            "best_ratio": best.ratio,
            "best_ratio_hw": best.ratio_hw,
            "within_ceiling": all(r.alg_mean <= ceiling + r.alg_hw for r in reports.values()),
            "pairs_ok": all(r.extra.get("max_double_pairs", 0) <= hard.n - 1 for r in reports.values()),
            "reduction": reduction.summary() if reduction else None,
        })
    return rows


def nonincreasing(values: Sequence[float], slack: Sequence[float]) -> bool:
    """True when each value is at most the previous one, up to the combined half-widths."""
    return all(values[i + 1] <= values[i] + slack[i] + slack[i + 1] for i in range(len(values) - 1))
