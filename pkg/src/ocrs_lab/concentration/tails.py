"""Empirical upper tails of f at a scaled-down Bernoulli vector.

The mean of f(X) and the tail of f(X^(s)) come from disjoint sample phases,
so the threshold is never fitted to the sample it is tested on.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError
from ..stats import wilson
from ..streams import DEFAULT_CHUNK, map_chunks, substream
from .bounds import bound_mcdiarmid, bound_new, scale
from .functions import SetFunction

SLACK_WIDTHS = 3.0


@dataclass
class TailEstimate:
    s: float
    t: float
    mean_hat: float
    threshold: float
    exceed: int
    samples: int
    empirical: float
    ci_lo: float
    ci_hi: float
    bound: float

    @property
    def halfwidth(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2.0

    @property
    def within_bound(self) -> bool:
        return self.empirical <= self.bound + SLACK_WIDTHS * self.halfwidth

    def to_dict(self) -> dict:
        return asdict(self)


def sample_values(f: SetFunction, p, n: int, *, seed: int, tag: str, threads: int = 1,
                  chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    p = np.asarray(p, dtype=float)

    def run(c, rows):
        X = substream(seed, tag, c).random((rows, f.dim)) < p
        return f(X)

    parts = map_chunks(run, n, threads, chunk)
    return np.concatenate(parts) if parts else np.zeros(0)


def estimate_mean(f: SetFunction, p, n: int, *, seed: int, threads: int = 1) -> float:
    return float(sample_values(f, p, n, seed=seed, tag=f"conc-mean:{f.name}", threads=threads).mean())


def _tail(values, mean_hat, s, t) -> TailEstimate:
    thr = mean_hat + t
    exceed = int(np.count_nonzero(values >= thr))
    n = values.shape[0]
    lo, hi = wilson(exceed, n)
    return TailEstimate(s, t, mean_hat, thr, exceed, n, exceed / n, lo, hi, bound_new(s, t))


def empirical_tail(f: SetFunction, p, s: float, t: float, n: int, *, seed: int, mean_samples: int | None = None,
                   threads: int = 1) -> TailEstimate:
    """Pr[f(X^(s)) >= mean_hat(f(X)) + t] with its Wilson interval and the bound e^{-st}."""
    if not 0 < s <= 1 or t <= 0:
        raise InputError("need s in (0, 1] and t > 0")
    mean_hat = estimate_mean(f, p, mean_samples or n, seed=seed, threads=threads)
    vals = sample_values(f, scale(p, s), n, seed=seed, tag=f"conc-tail:{f.name}:{s!r}", threads=threads)
    return _tail(vals, mean_hat, s, t)


def sweep(f: SetFunction, p, grid: Sequence[tuple[float, float]], n: int, *, seed: int,
          mean_samples: int | None = None, threads: int = 1) -> list[TailEstimate]:
    """Tail estimates over an (s, t) grid; one mean phase, one tail phase per distinct s."""
    for s, t in grid:
        if not 0 < s <= 1 or t <= 0:
            raise InputError(f"grid point ({s}, {t}) needs s in (0, 1] and t > 0")
    mean_hat = estimate_mean(f, p, mean_samples or n, seed=seed, threads=threads)
    cache: dict[float, np.ndarray] = {}
    out = []
    for s, t in grid:
        if s not in cache:
            cache[s] = sample_values(f, scale(p, s), n, seed=seed, tag=f"conc-tail:{f.name}:{s!r}", threads=threads)
        out.append(_tail(cache[s], mean_hat, s, t))
    return out


def sweep_rows(f: SetFunction, estimates: Sequence[TailEstimate]) -> list[dict]:
    rows = []
    for est in estimates:
        rows.append({
            "function": f.name,
            "s": est.s,
            "t": est.t,
            "bound_new": est.bound,
            "bound_mcdiarmid": bound_mcdiarmid(f.dim, est.t),
            "empirical": est.empirical,
            "ci_lo": est.ci_lo,
            "ci_hi": est.ci_hi,
            "N": est.samples,
            "mean_hat": est.mean_hat,
            "within_bound": est.within_bound,
        })
    return rows


def default_grid(k: int = 100) -> list[tuple[float, float]]:
    """A 4 x 4 grid plus the point (sqrt(ln k / k), sqrt(k ln k))."""
    s_k = math.sqrt(math.log(k) / k)
    t_k = math.sqrt(k * math.log(k))
    grid = [(s, t) for s in (0.05, 0.2, 0.5, 1.0) for t in (1.0, 3.0, 10.0, 30.0)]
    grid.append((s_k, t_k))
    return grid
