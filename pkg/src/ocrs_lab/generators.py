"""Instance families for the experiment runner.

A :class:`SelectionSetup` is everything the OCRS pipeline needs: a base
matroid, the number of folds k, and a certified marginal vector on the
extended ground set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import graphs
from .errors import InputError
from .matroids import schema
from .matroids.base import Matroid
from .matroids.families import GraphicMatroid, PartitionMatroid, UniformMatroid
from .matroids.union import ExtendedKFoldUnion
from .ocrs.marginals import MarginalVector, default_b, uniform_cyclic
from .prophet.distributions import DiscreteDistribution
from .prophet.hard import HardGirthInstance, build_hard_instance
from .prophet.instance import ProphetInstance
from .streams import substream

FAMILIES = ("uniform-suite", "graphic-catalog", "overloaded-partition", "hard-girth")


@dataclass
class SelectionSetup:
    name: str
    base: Matroid
    k: int
    marginals: MarginalVector
    b: float
    downsample: bool = True
    shrink: float | None = None
    notes: dict = field(default_factory=dict)

    @property
    def mk(self) -> ExtendedKFoldUnion:
        return ExtendedKFoldUnion(self.base, self.k)

    def chain_marginals(self) -> MarginalVector:
        """The vector the chain is built for: x itself, or x shrunk by the gate probability."""
        return self.marginals if self.shrink is None else self.marginals.shrink(self.shrink)

    def to_config(self) -> dict:
        return {
            "name": self.name,
            "matroid": schema.to_dict(self.base, top=False),
            "k": self.k,
            "b": self.b,
            "marginals": {
                "scale": self.marginals.b,
                "certificate": [{"set": sorted(s), "weight": w} for s, w in self.marginals.certificate],
            },
            "downsample": self.downsample,
            "shrink": self.shrink,
        }


def uniform_suite(k: int, n: int | None = None, b: float | None = None) -> SelectionSetup:
    """U(n, 1) folded k times with x = b*k/n on the first copies (cyclic certificate).

    For k = 1 the pipeline is the single-matroid one: the point x = 1/n is kept
    as is and a gate of probability b thins the active elements.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    n = (2 if k == 1 else 4 * k) if n is None else int(n)
    if n < k:
        raise InputError("uniform-suite needs n >= k")
    base = UniformMatroid(n, 1)
    if k == 1:
        b = 0.5 if b is None else float(b)
        x = uniform_cyclic(n, 1, 1)
        return SelectionSetup(f"uniform-k1-n{n}", base, 1, x, b, downsample=False, shrink=b)
    b = default_b(k) if b is None else float(b)
    x = uniform_cyclic(n, k, b, embed=lambda e: e * k, size=n * k)
    return SelectionSetup(f"uniform-k{k}-n{n}", base, k, x, b)


def uniform_prophet(k: int, n: int, eps: float) -> ProphetInstance:
    """U(n, k) with element 0 worth 1 for sure and every other element worth 1/eps w.p. eps.

    With k = 1, n = 2 this is the classical two-element instance.
    """
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    if n < 1 or k < 1:
        raise InputError("need n >= 1 and k >= 1")
    heavy = DiscreteDistribution((1.0 / eps, 0.0), (eps, 1.0 - eps))
    dists = [DiscreteDistribution.point(1.0)] + [heavy] * (n - 1)
    return ProphetInstance(UniformMatroid(n, k), dists, list(range(n)))


def overloaded_partition(blocks: int = 3, b: float | None = None) -> SelectionSetup:
    """A partition instance whose first protection set is non-empty.

    Block 0 holds three elements with capacity 2; every further block holds two
    elements with capacity 1; k = 2.  The certificate puts both copies of
    element 2 in every set, so its group is loaded well above b*k in
    expectation and gets protected.  ``blocks = 1`` leaves the single block.
    """
    if blocks < 1:
        raise InputError("blocks must be >= 1")
    k = 2
    part = [[0, 1, 2]] + [[3 + 2 * j, 4 + 2 * j] for j in range(blocks - 1)]
    base = PartitionMatroid(part, [2] + [1] * (blocks - 1))
    mk = ExtendedKFoldUnion(base, k)
    heavy = [mk.index(2, 1), mk.index(2, 2)]
    pairs = [((1, 1), (1, 2)), ((0, 1), (0, 2)), ((0, 1), (1, 1)), ((0, 2), (1, 2))]
    sets = []
    for i, pair in enumerate(pairs):
        s = heavy + [mk.index(e, c) for e, c in pair]
        for j in range(blocks - 1):
            e = 3 + 2 * j + (i % 2)
            s += [mk.index(e, 1), mk.index(e, 2)]
        sets.append(s)
    b = default_b(k) if b is None else float(b)
    x = MarginalVector.from_certificate(mk.size, sets, [0.25] * 4, b)
    return SelectionSetup(f"overloaded-partition-{blocks}", base, k, x, b)


def _random_forest(g: graphs.Graph, rng: np.random.Generator) -> list[int]:
    n, edges = g
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    out = []
    for i in rng.permutation(len(edges)):
        ra, rb = find(edges[i][0]), find(edges[i][1])
        if ra != rb:
            parent[ra] = rb
            out.append(int(i))
    return out


def graphic_catalog(name: str, k: int = 2, b: float | None = None, forests: int = 8, seed: int = 0) -> SelectionSetup:
    """A catalog graph folded k times; each certificate set is a union of k random spanning forests."""
    if k < 1 or forests < 1:
        raise InputError("need k >= 1 and forests >= 1")
    g = graphs.by_name(name)
    base = GraphicMatroid(*g)
    sets = []
    for i in range(forests):
        rng = substream(seed, "gen-forest", i)
        edges: set[int] = set()
        for _ in range(k):
            edges.update(_random_forest(g, rng))
        sets.append([e * k for e in sorted(edges)])
    b = default_b(k) if b is None else float(b)
    x = MarginalVector.from_certificate(base.size * k, sets, [1.0 / forests] * forests, b)
    return SelectionSetup(f"graphic-{name}-k{k}", base, k, x, b)


def hard_girth(name: str, eps: float) -> HardGirthInstance:
    return build_hard_instance(graphs.by_name(name), eps)
