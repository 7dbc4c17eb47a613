import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocrs_lab import graphs, kernels

needs_compiled = pytest.mark.skipif("compiled" not in kernels.available(), reason="compiled kernels not built")


def _partition_case(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 30))
    B = int(rng.integers(1, 5))
    L = int(rng.integers(1, 4))
    T = int(rng.integers(1, 20))
    block = rng.integers(0, B, n)
    level = rng.integers(0, L, n)
    cap = rng.integers(0, 4, B)
    base = rng.integers(0, 3, (L, B))
    order = np.stack([rng.permutation(n) for _ in range(T)])
    cand = (rng.random((T, n)) < 0.6).astype(np.uint8)
    return block, level, base, cap, order, cand


def _graphic_case(seed):
    rng = np.random.default_rng(seed)
    nv, edges = graphs.by_name(str(rng.choice(["petersen", "k5", "heawood", "cycle-7"])))
    eu = np.array([u for u, _ in edges])
    ev = np.array([v for _, v in edges])
    n = len(edges)
    L = int(rng.integers(1, 4))
    T = int(rng.integers(1, 15))
    level = rng.integers(0, L, n)
    init = np.stack([kernels.forest_parent(nv, eu, ev, rng.choice(n, size=int(rng.integers(0, 4)), replace=False))
                     for _ in range(L)])
    order = np.stack([rng.permutation(n) for _ in range(T)])
    cand = (rng.random((T, n)) < 0.5).astype(np.uint8)
    return eu, ev, level, init, order, cand


def _partition_reference(block, level, base, cap, order, cand):
    T, n = cand.shape
    out = np.zeros((T, n), dtype=np.uint8)
    for t in range(T):
        count = base.copy()
        for e in order[t]:
            if cand[t, e] and count[level[e], block[e]] < cap[block[e]]:
                count[level[e], block[e]] += 1
                out[t, e] = 1
    return out


@given(st.integers(0, 10_000))
def test_python_partition_matches_reference(seed):
    case = _partition_case(seed)
    assert np.array_equal(kernels.level_greedy_partition(*case, backend="python"), _partition_reference(*case))


@needs_compiled
@given(st.integers(0, 10_000))
def test_partition_backends_agree(seed):
    case = _partition_case(seed)
    a = kernels.level_greedy_partition(*case, backend="compiled")
    b = kernels.level_greedy_partition(*case, backend="python")
    assert np.array_equal(a, b)


@needs_compiled
@given(st.integers(0, 10_000))
def test_graphic_backends_agree(seed):
    case = _graphic_case(seed)
    a = kernels.level_greedy_graphic(*case, backend="compiled")
    b = kernels.level_greedy_graphic(*case, backend="python")
    assert np.array_equal(a, b)


@needs_compiled
@given(st.integers(0, 10_000))
def test_span_counts_backends_agree(seed):
    eu, ev, _, init, _, cand = _graphic_case(seed)
    a = kernels.graphic_span_counts(eu, ev, init[0], cand, backend="compiled")
    b = kernels.graphic_span_counts(eu, ev, init[0], cand, backend="python")
    assert np.array_equal(a, b)


def test_graphic_accepts_a_forest():
    eu, ev, level, init, order, cand = _graphic_case(3)
    level[:] = 0
    init = init[:1]
    acc = kernels.level_greedy_graphic(eu, ev, level, init, order, cand, backend="python")
    nv = int(max(eu.max(), ev.max())) + 1
    for row in acc:
        chosen = np.flatnonzero(row)
        parent = kernels.forest_parent(nv, eu, ev, chosen)
        # a forest on nv vertices with c components has nv - c edges
        assert len(chosen) == nv - len(set(parent.tolist()))


def test_span_counts_triangle():
    eu, ev = np.array([0, 1, 0]), np.array([1, 2, 2])
    present = np.array([[1, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=np.uint8)
    counts = kernels.graphic_span_counts(eu, ev, np.arange(3), present, backend="python")
    assert counts.tolist() == [2, 1, 1]


def test_env_forces_python(monkeypatch):
    monkeypatch.setenv("OCRS_LAB_KERNELS", "python")
    assert kernels.default_backend() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.level_greedy_partition(*_partition_case(0), backend="fortran")
