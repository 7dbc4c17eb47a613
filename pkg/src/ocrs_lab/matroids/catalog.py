"""The bundled corpus of small matroids used by oracle verification."""
from __future__ import annotations

import itertools

from .. import graphs
from .base import Matroid
from .families import ExplicitMatroid, GraphicMatroid, PartitionMatroid, UniformMatroid
from .union import UnionMatroid

FANO_LINES = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def fano() -> ExplicitMatroid:
    bases = [b for b in itertools.combinations(range(7), 3) if b not in FANO_LINES]
    return ExplicitMatroid(7, bases)


def small_corpus() -> dict[str, Matroid]:
    """Every matroid here has at most 8 elements."""
    k4 = graphs.complete(4)
    return {
        "uniform-1-4": UniformMatroid(4, 1),
        "uniform-2-5": UniformMatroid(5, 2),
        "uniform-3-6": UniformMatroid(6, 3),
        "graphic-k3": GraphicMatroid(*graphs.complete(3)),
        "graphic-k4": GraphicMatroid(*k4),
        "graphic-c5": GraphicMatroid(*graphs.cycle(5)),
        "graphic-multi": GraphicMatroid(4, [(0, 1), (0, 1), (1, 2), (2, 0), (2, 3), (3, 3)]),
        "graphic-k23": GraphicMatroid(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]),
        "partition-112": PartitionMatroid([[0, 1, 2], [3, 4], [5, 6, 7]], [1, 1, 2]),
        "partition-21": PartitionMatroid([[0, 1], [2, 3, 4, 5]], [2, 1]),
        "explicit-fano": fano(),
        "explicit-u24": ExplicitMatroid(4, itertools.combinations(range(4), 2)),
        "union-u13-k3": UnionMatroid([UniformMatroid(3, 1), GraphicMatroid(*graphs.complete(3))]),
    }
