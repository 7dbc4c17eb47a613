import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ocrs_lab import graphs
from ocrs_lab.errors import CapabilityError, InputError
from ocrs_lab.matroids import (ExplicitMatroid, ExtendedKFoldUnion, GraphicMatroid, PartitionMatroid, UniformMatroid,
                               UnionMatroid, extend_kfold, kfold_union, occupancy, occupancy_batch, union_rank)
from ocrs_lab.matroids import schema
from ocrs_lab.matroids.brute import (brute_extended_count_ranks, brute_extended_ranks, brute_girth,
                                     brute_partitions_rank, brute_union_ranks, count_code, members)
from ocrs_lab.matroids.catalog import fano, small_corpus

CORPUS = small_corpus()
NAMES = sorted(CORPUS)


def subsets_of(n):
    return st.frozensets(st.integers(0, n - 1), max_size=n) if n else st.just(frozenset())


@st.composite
def corpus_and_sets(draw):
    name = draw(st.sampled_from(NAMES))
    m = CORPUS[name]
    a = draw(subsets_of(m.size))
    b = draw(subsets_of(m.size))
    return m, a, b


class TestFamilies:
    def test_uniform_rank(self):
        m = UniformMatroid(5, 2)
        assert m.rank([0, 1, 2]) == 2
        assert m.rank([]) == 0
        assert m.girth() == 3

    def test_graphic_triangle(self):
        m = GraphicMatroid(*graphs.complete(3))
        assert m.rank([0, 1, 2]) == 2
        assert m.is_independent([0, 1])
        assert m.in_span(2, [0, 1])
        assert m.girth() == 3

    def test_partition_rank(self):
        m = PartitionMatroid([[0, 1], [2, 3, 4]], [1, 2])
        assert m.rank([0, 1, 2, 3, 4]) == 3
        assert m.rank([2, 3, 4]) == 2

    def test_fano(self):
        m = fano()
        assert m.full_rank() == 3
        assert m.rank([0, 1, 2]) == 2
        assert m.girth() == 3

    def test_explicit_rejects_non_matroid(self):
        with pytest.raises(InputError):
            ExplicitMatroid(4, [[0, 1], [2]])

    def test_out_of_range(self):
        with pytest.raises(InputError):
            UniformMatroid(3, 1).rank([3])

    def test_partition_validation(self):
        with pytest.raises(InputError):
            PartitionMatroid([[0, 1], [1, 2]], [1, 1])

    def test_loops(self):
        m = GraphicMatroid(2, [(0, 0), (0, 1)])
        assert m.loops() == frozenset({0})
        assert m.girth() == 1

    def test_span_and_restriction(self):
        m = GraphicMatroid(*graphs.complete(4))
        assert m.span([0, 1]) == frozenset({0, 1, 3})
        r = m.restrict([0, 1, 3])
        assert r.rank([0, 1, 2]) == 2
        assert r.girth() == 3

    def test_generic_girth_guard(self):
        with pytest.raises(CapabilityError):
            ExplicitMatroid(30, [range(30)], validate=False).girth()


class TestGirth:
    @pytest.mark.parametrize("name, expected", [("petersen", 5), ("heawood", 6), ("mcgee", 7), ("k4", 3),
                                                ("pg2-2", 6), ("pg2-3", 6)])
    def test_catalog(self, name, expected):
        assert GraphicMatroid(*graphs.by_name(name)).girth() == expected

    def test_projective_plane_sizes(self):
        for q in (2, 3, 4, 5, 7, 8, 9):
            n, edges = graphs.projective_plane_incidence(q)
            N = q * q + q + 1
            assert n == 2 * N
            assert len(edges) == N * (q + 1)

    def test_against_enumeration(self):
        for name in ("graphic-k4", "graphic-c5", "graphic-multi", "graphic-k23", "explicit-fano"):
            m = CORPUS[name]
            assert m.girth() == brute_girth(m)


class TestRankAxioms:
    @given(corpus_and_sets())
    def test_bounded_monotone_submodular(self, data):
        m, a, b = data
        assert 0 <= m.rank(a) <= len(a)
        assert m.rank(a & b) <= m.rank(a)
        assert m.rank(a | b) + m.rank(a & b) <= m.rank(a) + m.rank(b)

    @given(corpus_and_sets())
    def test_span_closure(self, data):
        m, a, _ = data
        sp = m.span(a)
        assert a <= sp
        assert m.rank(sp) == m.rank(a)
        assert m.span(sp) == sp


class TestUnion:
    @pytest.mark.parametrize("name", NAMES)
    @pytest.mark.parametrize("k", [1, 2])
    def test_union_matches_brute(self, name, k):
        m = CORPUS[name]
        brute = brute_union_ranks([m] * k)
        for mask in range(1 << m.size):
            assert union_rank([m] * k, members(mask)) == brute[mask]

    def test_mixed_union(self):
        parts = [UniformMatroid(4, 1), GraphicMatroid(3, [(0, 1), (1, 2), (0, 2), (0, 1)])]
        u = UnionMatroid(parts)
        for s in itertools.chain.from_iterable(itertools.combinations(range(4), r) for r in range(5)):
            assert u.rank(s) == brute_partitions_rank(parts, s)

    def test_decompose_is_valid(self):
        m = GraphicMatroid(*graphs.complete(4))
        u = kfold_union(m, 2)
        parts = u.decompose(range(6))
        assert sum(len(p) for p in parts) == 6
        assert all(m.is_independent(p) for p in parts)

    def test_union_sizes_must_match(self):
        with pytest.raises(InputError):
            UnionMatroid([UniformMatroid(3, 1), UniformMatroid(4, 1)])

    @pytest.mark.parametrize("name", ["graphic-k4", "partition-21", "explicit-u24", "graphic-multi"])
    @pytest.mark.parametrize("k", [2, 3])
    def test_extended_first_copies_equal_union(self, name, k):
        m = CORPUS[name]
        mk = extend_kfold(m, k)
        brute = brute_union_ranks([m] * k)
        first = mk.first_copies()
        for mask in range(1 << m.size):
            assert mk.rank([first[e] for e in members(mask)]) == brute[mask]

    @pytest.mark.parametrize("name", ["graphic-k3", "uniform-1-4", "partition-21", "explicit-u24"])
    def test_count_classes_match_bitmask(self, name):
        m = CORPUS[name]
        k = 2
        if m.size * k > 12:
            pytest.skip("too large for the bitmask oracle")
        counts = brute_extended_count_ranks(m, k)
        brute = brute_extended_ranks(m, k)
        for mask in range(1 << (m.size * k)):
            assert counts[count_code(members(mask), k)] == brute[mask]

    def test_extended_indexing(self):
        mk = extend_kfold(UniformMatroid(3, 1), 4)
        assert mk.index(2, 3) == 10
        assert mk.element(10) == (2, 3)
        assert mk.group(1) == frozenset({4, 5, 6, 7})
        with pytest.raises(InputError):
            mk.index(3, 1)

    def test_restrict_groups(self):
        base = GraphicMatroid(*graphs.complete(4))
        mk = extend_kfold(base, 2)
        sub, mapping = mk.restrict_groups([1, 3])
        assert mapping == [2, 3, 6, 7]
        for mask in range(1 << 4):
            s = members(mask)
            assert sub.rank(s) == mk.rank([mapping[i] for i in s])


class TestOccupancy:
    @pytest.mark.parametrize("k", [2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_uniform_closed_form(self, k, n):
        mk = extend_kfold(UniformMatroid(n, 1), k)
        for mask in range(1 << mk.size):
            s = members(mask)
            for e in range(n):
                assert occupancy(mk, e, s) == min(k, len(s))

    def test_loop_occupancy_is_k(self):
        mk = extend_kfold(GraphicMatroid(2, [(0, 0), (0, 1)]), 3)
        for mask in range(0, 1 << mk.size, 7):
            assert occupancy(mk, 0, members(mask)) == 3

    def test_batch_matches_scalar(self):
        mk = extend_kfold(GraphicMatroid(*graphs.complete(4)), 2)
        rng = np.random.default_rng(0)
        masks = rng.random((40, mk.size)) < 0.4
        got = occupancy_batch(mk, 2, masks)
        want = [occupancy(mk, 2, np.flatnonzero(r).tolist()) for r in masks]
        assert got.tolist() == want

    @given(st.sampled_from(["graphic-k4", "partition-112", "explicit-fano", "graphic-multi"]),
           st.integers(1, 3), st.data())
    def test_properties_random(self, name, k, data):
        m = CORPUS[name]
        mk = extend_kfold(m, k)
        e = data.draw(st.integers(0, m.size - 1))
        T = data.draw(subsets_of(mk.size))
        S = data.draw(st.frozensets(st.sampled_from(sorted(T)), max_size=len(T))) if T else frozenset()
        a = data.draw(st.integers(0, mk.size - 1))
        assert occupancy(mk, e, S) <= occupancy(mk, e, T)
        assert 0 <= occupancy(mk, e, S | {a}) - occupancy(mk, e, S) <= 1
        if occupancy(mk, e, S) < k:
            for i in mk.group(e):
                assert not mk.in_span(i, S - {i})


class TestSchema:
    @pytest.mark.parametrize("name", NAMES)
    def test_round_trip(self, name):
        m = CORPUS[name]
        again = schema.loads(schema.dumps(m))
        assert schema.dumps(again) == schema.dumps(m)
        for mask in range(0, 1 << m.size, 3):
            assert again.rank(members(mask)) == m.rank(members(mask))

    def test_extended_and_restriction(self):
        mk = ExtendedKFoldUnion(GraphicMatroid(*graphs.complete(3)), 2)
        again = schema.loads(schema.dumps(mk))
        assert isinstance(again, ExtendedKFoldUnion)
        assert again.rank(range(6)) == mk.rank(range(6)) == 4
        r = CORPUS["graphic-k4"].restrict([0, 2, 5])
        assert schema.loads(schema.dumps(r)).rank([0, 1, 2]) == r.rank([0, 1, 2])

    @pytest.mark.parametrize("doc", [
        {"kind": "uniform", "n": 3},
        {"kind": "uniform", "n": 3, "k": 1, "extra": 0},
        {"kind": "nope"},
        {"kind": "uniform", "n": 3, "k": 1, "schema_version": 99},
        [1, 2],
    ])
    def test_rejects_malformed(self, doc):
        with pytest.raises(InputError):
            schema.from_dict(doc)

    def test_labels_preserved(self):
        m = UniformMatroid(2, 1, labels=["a", "b"])
        again = schema.loads(schema.dumps(m))
        assert again.ground.labels == ("a", "b")


def test_partition_structure_of_extended_union():
    mk = extend_kfold(PartitionMatroid([[0, 1], [2]], [1, 1]), 3)
    ps = mk.partition_structure()
    assert ps.capacity.tolist() == [3, 3]
    assert mk.rank(range(mk.size)) == 6
    assert math.isclose(mk.rank(list(mk.group(0))), 3)
