"""The kn-uniform instance where E[f(X)] is small yet Pr[f(X) >= k] is not.

The extended k-fold union of an n-uniform matroid on 2n elements is
kn-uniform on 2kn elements.  For S avoiding e's copies,
occ_e(S) = 0 if |S| <= kn - k, |S| - (kn - k) in between, and k once |S| >= kn.
Every coordinate is active with probability 1/2 - 1/(2n), which puts the
mean and median of |X| at kn - k.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import binom

from ..errors import InputError
from ..stats import mean_ci, wilson
from ..streams import DEFAULT_CHUNK, map_chunks, substream

GUARD = 50


def piecewise_occupancy(size: np.ndarray, n: int, k: int) -> np.ndarray:
    size = np.asarray(size)
    return np.clip(size - (k * n - k), 0, k)


@dataclass
class CounterexampleReport:
    n: int
    k: int
    p: float
    samples: int
    mean_hat: float
    mean_hw: float
    tail_hat: float
    tail_lo: float
    tail_hi: float
    tail_exact: float
    mean_exact: float

    @property
    def mean_ok(self) -> bool:
        return self.mean_hat <= self.k / 2 + self.mean_hw

    @property
    def tail_ok(self) -> bool:
        return self.tail_hat >= 0.3 - (self.tail_hi - self.tail_lo) / 2

    @property
    def oracle_gap(self) -> float:
        return abs(self.tail_hat - self.tail_exact)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(mean_ok=self.mean_ok, tail_ok=self.tail_ok, oracle_gap=self.oracle_gap)
        return d


def exact_tail(n: int, k: int) -> float:
    """Pr[Bin(2kn, 1/2 - 1/(2n)) >= kn]."""
    return float(binom.sf(k * n - 1, 2 * k * n, 0.5 - 0.5 / n))


def exact_mean(n: int, k: int) -> float:
    dim = 2 * k * n
    lo = k * n - k
    support = np.arange(lo, dim + 1)
    return float((binom.pmf(support, dim, 0.5 - 0.5 / n) * piecewise_occupancy(support, n, k)).sum())


def counterexample_starstar(n: int, k: int, samples: int, *, seed: int, threads: int = 1,
                            chunk: int = DEFAULT_CHUNK // 4) -> CounterexampleReport:
    """Simulate every one of the 2kn coordinates and evaluate the piecewise occupancy."""
    if k < 1 or n < GUARD * k:
        raise InputError(f"need k >= 1 and n >= {GUARD}*k")
    if samples < 1:
        raise InputError("samples must be >= 1")
    dim = 2 * k * n
    p = 0.5 - 0.5 / n

    def run(c, rows):
        size = (substream(seed, "counterexample", c).random((rows, dim)) < p).sum(axis=1)
        f = piecewise_occupancy(size, n, k)
        return float(f.sum()), float((f * f).sum()), int(np.count_nonzero(f >= k))

    parts = map_chunks(run, samples, threads, chunk)
    total = sum(a for a, _, _ in parts)
    total_sq = sum(b for _, b, _ in parts)
    hits = sum(c for _, _, c in parts)
    mean, hw = mean_ci(total, total_sq, samples)
    lo, hi = wilson(hits, samples)
    return CounterexampleReport(n, k, p, samples, mean, hw, hits / samples, lo, hi, exact_tail(n, k),
                                exact_mean(n, k))
