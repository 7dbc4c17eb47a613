"""Pure numpy versions of the trial loops, vectorised across trials.

Each function returns exactly what its compiled twin in ``_ckernels`` returns.
"""
from __future__ import annotations

import numpy as np


def level_greedy_partition(elem_block, elem_level, base_count, cap, order, cand):
    T, P = order.shape
    n = elem_block.shape[0]
    L, B = base_count.shape
    acc = np.zeros((T, n), dtype=np.uint8)
    count = np.broadcast_to(base_count, (T, L, B)).copy()
    rows = np.arange(T)
    cand = cand.astype(bool)
    for p in range(P):
        e = order[:, p]
        live = cand[rows, e]
        j = elem_level[e]
        blk = elem_block[e]
        ok = live & (count[rows, j, blk] < cap[blk])
        count[rows[ok], j[ok], blk[ok]] += 1
        acc[rows[ok], e[ok]] = 1
    return acc


class _BatchUnionFind:
    """One union-find forest per trial row, over a flat vertex space."""

    def __init__(self, init_parent: np.ndarray, rows: int):
        init = np.atleast_2d(init_parent)
        offsets = (np.arange(init.shape[0]) * init.shape[1])[:, None]
        self.parent = np.tile((init + offsets).reshape(-1), (rows, 1))
        self.rows = np.arange(rows)

    def find(self, sel: np.ndarray, verts: np.ndarray) -> np.ndarray:
        r = verts.copy()
        rows = self.rows[sel]
        while True:
            p = self.parent[rows, r]
            moving = p != r
            if not moving.any():
                break
            r = np.where(moving, p, r)
        self.parent[rows, verts] = r
        return r

    def link(self, sel: np.ndarray, ra: np.ndarray, rb: np.ndarray) -> None:
        self.parent[self.rows[sel], ra] = rb


def level_greedy_graphic(eu, ev, elem_level, init_parent, order, cand):
    T, P = order.shape
    n = eu.shape[0]
    L, V = init_parent.shape
    acc = np.zeros((T, n), dtype=np.uint8)
    uf = _BatchUnionFind(init_parent, T)
    rows = np.arange(T)
    cand = cand.astype(bool)
    for p in range(P):
        e = order[:, p]
        live = cand[rows, e]
        if not live.any():
            continue
        e = e[live]
        off = elem_level[e] * V
        ra = uf.find(live, eu[e] + off)
        rb = uf.find(live, ev[e] + off)
        ok = ra != rb
        sel = np.flatnonzero(live)[ok]
        mask = np.zeros(T, dtype=bool)
        mask[sel] = True
        uf.link(mask, ra[ok], rb[ok])
        acc[sel, e[ok]] = 1
    return acc


def graphic_span_counts(eu, ev, init_parent, present):
    T, n = present.shape
    counts = np.zeros(n, dtype=np.int64)
    if T == 0:
        return counts
    uf = _BatchUnionFind(init_parent, T)
    present = present.astype(bool)
    for e in range(n):
        live = present[:, e]
        if not live.any():
            continue
        m = int(live.sum())
        ra = uf.find(live, np.full(m, eu[e]))
        rb = uf.find(live, np.full(m, ev[e]))
        ok = ra != rb
        sel = np.flatnonzero(live)[ok]
        mask = np.zeros(T, dtype=bool)
        mask[sel] = True
        uf.link(mask, ra[ok], rb[ok])
    every = np.ones(T, dtype=bool)
    for e in range(n):
        ra = uf.find(every, np.full(T, eu[e]))
        rb = uf.find(every, np.full(T, ev[e]))
        counts[e] = int((ra == rb).sum())
    return counts
