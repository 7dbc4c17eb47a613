"""Brute-force cross-checks of the rank oracles, run by ``ocrs-lab verify-oracles``."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .matroids.base import Matroid
from .matroids.brute import (brute_extended_count_ranks, brute_extended_ranks, brute_union_ranks, count_code,
                             members)
from .matroids.catalog import small_corpus
from .matroids.families import UniformMatroid
from .matroids.union import extend_kfold, kfold_union, occupancy, union_rank

BITMASK_LIMIT = 12
EXACT_OCC_LIMIT = 16


@dataclass
class Check:
    check: str
    matroid: str
    k: int
    cases: int
    mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def _count_vectors(n: int, k: int):
    radix = k + 1
    for code in range(radix ** n):
        yield code, [(code // radix ** e) % radix for e in range(n)]


def _representative(counts, k):
    return [e * k + i for e, c in enumerate(counts) for i in range(c)]


def check_union(name: str, m: Matroid, k: int) -> list[Check]:
    """Union rank (augmenting paths and the k-fold wrapper) against exhaustive splitting, all subsets."""
    brute = brute_union_ranks([m] * k)
    wrapped = kfold_union(m, k)
    bad_path = bad_wrap = 0
    for mask in range(1 << m.size):
        s = members(mask)
        bad_path += union_rank([m] * k, s) != brute[mask]
        bad_wrap += wrapped.rank(s) != brute[mask]
    return [Check("union-rank", name, k, 1 << m.size, bad_path),
            Check("kfold-union-rank", name, k, 1 << m.size, bad_wrap)]


def check_extended(name: str, m: Matroid, k: int) -> list[Check]:
    """Extended-union rank on every subset.

    Every subset is covered through its copy-count class; where the extended
    ground set has at most 12 elements each subset is also checked one by one
    against the bitmask brute force.
    """
    mk = extend_kfold(m, k)
    counts = brute_extended_count_ranks(m, k)
    bad = cases = 0
    for code, c in _count_vectors(m.size, k):
        bad += mk.rank(_representative(c, k)) != counts[code]
        cases += 1
    out = [Check("extended-rank-classes", name, k, cases, bad)]
    if mk.size <= BITMASK_LIMIT:
        brute = brute_extended_ranks(m, k)
        bad = 0
        for mask in range(1 << mk.size):
            s = members(mask)
            bad += mk.rank(s) != brute[mask]
            bad += counts[count_code(s, k)] != brute[mask]
        out.append(Check("extended-rank-subsets", name, k, 1 << mk.size, bad))
    first = mk.first_copies()
    brute_u = brute_union_ranks([m] * k)
    bad = 0
    for mask in range(1 << m.size):
        bad += mk.rank([first[e] for e in members(mask)]) != brute_u[mask]
    out.append(Check("first-copies-union", name, k, 1 << m.size, bad))
    return out


def check_uniform_occupancy(n: int, k: int) -> Check:
    """occ_e(S) = min(k, |S|) on the extended union of U(n, 1), for every e and every subset class."""
    mk = extend_kfold(UniformMatroid(n, 1), k)
    bad = cases = 0
    if mk.size <= EXACT_OCC_LIMIT:
        masks = ((np.arange(1 << mk.size)[:, None] >> np.arange(mk.size)[None, :]) & 1).astype(bool)
        size = masks.sum(axis=1)
        base = mk.rank_batch(masks)
        for e in range(n):
            with_group = masks.copy()
            with_group[:, sorted(mk.group(e))] = True
            occ = k - mk.rank_batch(with_group) + base
            bad += int(np.count_nonzero(occ != np.minimum(k, size)))
            cases += masks.shape[0]
    else:
        for _, c in _count_vectors(n, k):
            s = _representative(c, k)
            for e in range(n):
                bad += occupancy(mk, e, s) != min(k, len(s))
                cases += 1
    return Check("uniform-occupancy", f"U({n},1)", k, cases, bad)


def verify_oracles(corpus: list[str] | None = None, max_k: int = 3, occupancy_ks=(2, 3, 5),
                   occupancy_max_n: int = 6) -> dict:
    mats = small_corpus()
    names = list(mats) if corpus is None else list(corpus)
    unknown = [n for n in names if n not in mats]
    if unknown:
        from .errors import InputError

        raise InputError(f"unknown corpus matroids: {unknown}")
    checks: list[Check] = []
    for name in names:
        m = mats[name]
        for k in range(1, max_k + 1):
            checks += check_union(name, m, k)
            checks += check_extended(name, m, k)
    for k in occupancy_ks:
        for n in range(1, occupancy_max_n + 1):
            checks.append(check_uniform_occupancy(n, k))
    passed = all(c.ok for c in checks)
    return {
        "matroids": names,
        "checks": [c.to_dict() for c in checks],
        "total_cases": sum(c.cases for c in checks),
        "passed": passed,
        "message": "all brute-force checks passed" if passed else "brute-force mismatches found",
    }
