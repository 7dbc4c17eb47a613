# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial loops.  Semantics mirror ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.string cimport memcpy

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


def level_greedy_partition(const i64[::1] elem_block, const i64[::1] elem_level,
                           const i64[:, ::1] base_count, const i64[::1] cap,
                           const i64[:, ::1] order, const u8[:, ::1] cand):
    cdef Py_ssize_t T = order.shape[0], P = order.shape[1], n = elem_block.shape[0]
    cdef Py_ssize_t L = base_count.shape[0], B = base_count.shape[1]
    acc_arr = np.zeros((T, n), dtype=np.uint8)
    count_arr = np.zeros((L, B), dtype=np.int64)
    cdef u8[:, ::1] acc = acc_arr
    cdef i64[:, ::1] count = count_arr
    cdef Py_ssize_t t, p, e, j, blk
    with nogil:
        for t in range(T):
            for j in range(L):
                for blk in range(B):
                    count[j, blk] = base_count[j, blk]
            for p in range(P):
                e = order[t, p]
                if not cand[t, e]:
                    continue
                j = elem_level[e]
                blk = elem_block[e]
                if count[j, blk] < cap[blk]:
                    count[j, blk] += 1
                    acc[t, e] = 1
    return acc_arr


cdef inline i64 _find(i64* parent, i64 a) noexcept nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def level_greedy_graphic(const i64[::1] eu, const i64[::1] ev, const i64[::1] elem_level,
                         const i64[:, ::1] init_parent, const i64[:, ::1] order,
                         const u8[:, ::1] cand):
    cdef Py_ssize_t T = order.shape[0], P = order.shape[1], n = eu.shape[0]
    cdef Py_ssize_t L = init_parent.shape[0], V = init_parent.shape[1]
    acc_arr = np.zeros((T, n), dtype=np.uint8)
    work_arr = np.empty((L, V), dtype=np.int64)
    cdef u8[:, ::1] acc = acc_arr
    cdef i64[:, ::1] work = work_arr
    cdef i64* base
    cdef Py_ssize_t t, p, e, j
    cdef i64 ra, rb
    with nogil:
        for t in range(T):
            if L * V > 0:
                memcpy(&work[0, 0], &init_parent[0, 0], L * V * sizeof(i64))
            for p in range(P):
                e = order[t, p]
                if not cand[t, e]:
                    continue
                j = elem_level[e]
                base = &work[j, 0]
                ra = _find(base, eu[e])
                rb = _find(base, ev[e])
                if ra != rb:
                    base[ra] = rb
                    acc[t, e] = 1
    return acc_arr


def graphic_span_counts(const i64[::1] eu, const i64[::1] ev, const i64[::1] init_parent,
                        const u8[:, ::1] present):
    cdef Py_ssize_t T = present.shape[0], n = eu.shape[0], V = init_parent.shape[0]
    counts_arr = np.zeros(n, dtype=np.int64)
    work_arr = np.empty(V, dtype=np.int64)
    cdef i64[::1] counts = counts_arr
    cdef i64[::1] work = work_arr
    cdef i64* w
    cdef Py_ssize_t t, e
    cdef i64 ra, rb
    with nogil:
        w = &work[0] if V > 0 else NULL
        for t in range(T):
            if V > 0:
                memcpy(w, &init_parent[0], V * sizeof(i64))
            for e in range(n):
                if present[t, e]:
                    ra = _find(w, eu[e])
                    rb = _find(w, ev[e])
                    if ra != rb:
                        w[ra] = rb
            for e in range(n):
                if _find(w, eu[e]) == _find(w, ev[e]):
                    counts[e] += 1
    return counts_arr
