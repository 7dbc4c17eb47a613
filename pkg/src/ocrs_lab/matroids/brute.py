"""Exhaustive reference computations used as test oracles and by ``verify-oracles``.

Nothing here shares code with the augmenting-path union: independence of a
union is decided by searching over all splittings of a set.
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

from .base import Matroid

BRUTE_LIMIT = 14


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(s) -> int:
    m = 0
    for e in s:
        m |= 1 << e
    return m


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def independence_table(n: int, indep: Callable[[list[int]], bool]) -> list[bool]:
    return [indep(members(m)) for m in range(1 << n)]


def oracle_table(m: Matroid) -> list[bool]:
    return independence_table(m.size, lambda s: m.rank(s) == len(s))


def parallel_table(base: Matroid, k: int) -> list[bool]:
    """Independence in the parallel-copy extension straight from its definition."""
    def indep(s):
        proj = [e // k for e in s]
        return len(set(proj)) == len(proj) and base.rank(proj) == len(proj)
    return independence_table(base.size * k, indep)


def union_table(tables: Sequence[list[bool]], n: int) -> list[bool]:
    """Independence in a union: S splits into one independent set per table."""
    full = (1 << n) - 1
    cur = list(tables[0])
    for tab in tables[1:]:
        nxt = [False] * (1 << n)
        for s in range(1 << n):
            if cur[s]:
                nxt[s] = True
                continue
            t = s
            while True:
                if tab[t] and cur[s & ~t & full]:
                    nxt[s] = True
                    break
                if t == 0:
                    break
                t = (t - 1) & s
        cur = nxt
    return cur


def rank_table(indep: list[bool], n: int) -> list[int]:
    """rank(S) = |S| when independent, else max over S minus one element (supersets processed later)."""
    rank = [0] * (1 << n)
    for s in range(1 << n):
        if indep[s]:
            rank[s] = popcount(s)
            continue
        best = 0
        t = s
        while t:
            low = t & -t
            best = max(best, rank[s ^ low])
            t ^= low
        rank[s] = best
    return rank


def brute_union_ranks(bases: Sequence[Matroid]) -> list[int]:
    n = bases[0].size
    if n > BRUTE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_LIMIT} elements")
    tables = [oracle_table(b) for b in bases]
    return rank_table(union_table(tables, n), n)


def brute_extended_ranks(base: Matroid, k: int) -> list[int]:
    n = base.size * k
    if n > BRUTE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_LIMIT} elements")
    tab = parallel_table(base, k)
    return rank_table(union_table([tab] * k, n), n)


def brute_partitions_rank(bases: Sequence[Matroid], s: Sequence[int]) -> int:
    """Rank by trying every assignment of every subset of ``s`` to the parts (tiny inputs only)."""
    s = list(s)
    best = 0
    k = len(bases)
    for assign in itertools.product(range(k + 1), repeat=len(s)):
        groups = [[e for e, a in zip(s, assign) if a == j] for j in range(k)]
        if all(bases[j].rank(g) == len(g) for j, g in enumerate(groups)):
            best = max(best, sum(len(g) for g in groups))
    return best


def brute_girth(m: Matroid) -> float:
    import math

    for c in range(1, m.size + 1):
        for combo in itertools.combinations(range(m.size), c):
            if m.rank(combo) < c:
                return c
    return math.inf


def brute_extended_count_ranks(base: Matroid, k: int) -> np.ndarray:
    """Extended-union rank for every copy-count vector ``c`` in ``{0..k}^E``.

    Parallel copies are interchangeable, so a subset's rank depends only on how
    many copies of each base element it holds.  A count vector is independent
    when it is a sum of k indicator vectors of base-independent sets; its rank
    is the largest independent count vector below it.  Entry ``sum c_e (k+1)^e``.
    """
    n = base.size
    radix = k + 1
    if radix ** n > 1 << 20:
        raise ValueError("count-vector brute force limited to (k+1)^|E| <= 2^20")
    weights = radix ** np.arange(n, dtype=np.int64)
    indep = [mask for mask in range(1 << n) if base.rank(members(mask)) == popcount(mask)]
    codes = np.array([sum(int(weights[e]) for e in members(mask)) for mask in indep], dtype=np.int64)
    size = radix ** n
    digits = (np.arange(size, dtype=np.int64)[:, None] // weights[None, :]) % radix
    reach = np.zeros(size, dtype=bool)
    reach[0] = True
    for _ in range(k):
        src = np.flatnonzero(reach)
        sums = (src[:, None] + codes[None, :]).ravel()
        # a sum is valid only when no digit overflowed
        src_d = digits[src][:, None, :]
        add_d = ((codes[:, None] // weights[None, :]) % radix)[None, :, :]
        ok = ((src_d + add_d) <= k).all(axis=2).ravel()
        reach[sums[ok]] = True
    total = digits.sum(axis=1)
    rank = np.where(reach, total, 0)
    # digits only decrease along the predecessor steps, so increasing codes is a valid order
    for code in range(size):
        if reach[code]:
            continue
        best = 0
        for e in range(n):
            if digits[code, e]:
                best = max(best, rank[code - weights[e]])
        rank[code] = best
    return rank


def count_code(s, k: int) -> int:
    """Code of the copy-count vector of an extended subset (index = e*k + copy - 1)."""
    code = 0
    for i in s:
        code += (k + 1) ** (i // k)
    return code
