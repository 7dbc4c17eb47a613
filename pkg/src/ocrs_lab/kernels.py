"""Backend selection for the trial loops.

The compiled extension is used when it imports; set ``OCRS_LAB_KERNELS=python``
to force the numpy fallback.  Both backends produce identical arrays.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

BACKENDS = ("compiled", "python")


def available() -> list[str]:
    return ["compiled", "python"] if _ckernels is not None else ["python"]


def default_backend() -> str:
    forced = os.environ.get("OCRS_LAB_KERNELS", "").strip().lower()
    if forced == "python" or _ckernels is None:
        return "python"
    return "compiled"


def _module(backend: str | None):
    backend = backend or default_backend()
    if backend == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        return _ckernels
    if backend == "python":
        return _pykernels
    raise ValueError(f"unknown kernel backend {backend!r}")


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _u8(a):
    return np.ascontiguousarray(a, dtype=np.uint8)


def level_greedy_partition(elem_block, elem_level, base_count, cap, order, cand, backend=None):
    """Layered greedy on a partition matroid.

    Element ``e`` at level ``j`` is accepted iff it is a candidate and its block
    still has room at that level, where a level's block count starts at
    ``base_count[j, block]`` (the protected elements) and grows with acceptances.
    Returns a ``(trials, n)`` uint8 acceptance matrix.
    """
    return _module(backend).level_greedy_partition(
        _i64(elem_block), _i64(elem_level), _i64(base_count), _i64(cap), _i64(order), _u8(cand))


def level_greedy_graphic(eu, ev, elem_level, init_parent, order, cand, backend=None):
    """Layered greedy on a graphic matroid: one forest per level seeded by ``init_parent[j]``."""
    return _module(backend).level_greedy_graphic(
        _i64(eu), _i64(ev), _i64(elem_level), _i64(init_parent), _i64(order), _u8(cand))


def graphic_span_counts(eu, ev, init_parent, present, backend=None):
    """For each edge, the number of rows in which its endpoints are connected by the present edges."""
    return _module(backend).graphic_span_counts(_i64(eu), _i64(ev), _i64(init_parent), _u8(present))


def forest_parent(num_vertices: int, eu, ev, edges) -> np.ndarray:
    """Root pointer array of the forest spanned by ``edges`` (every vertex points at its root)."""
    parent = np.arange(num_vertices, dtype=np.int64)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        ra, rb = find(int(eu[e])), find(int(ev[e]))
        if ra != rb:
            parent[ra] = rb
    for v in range(num_vertices):
        parent[v] = find(v)
    return parent
