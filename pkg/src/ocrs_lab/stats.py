"""Interval helpers: Wilson, Hoeffding and a delta-method ratio interval."""
from __future__ import annotations

import math

import numpy as np
from statsmodels.stats.proportion import proportion_confint

Z95 = 1.959963984540054


def wilson(successes, trials, alpha: float = 0.05):
    """Wilson score interval; vectorised. Returns (lo, hi) with nan where trials == 0."""
    s = np.asarray(successes, dtype=float)
    n = np.asarray(trials, dtype=float)
    safe = np.where(n > 0, n, 1.0)
    lo, hi = proportion_confint(s, safe, alpha=alpha, method="wilson")
    lo = np.where(n > 0, lo, np.nan)
    hi = np.where(n > 0, hi, np.nan)
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def wilson_halfwidth(successes, trials, alpha: float = 0.05):
    lo, hi = wilson(successes, trials, alpha)
    return (np.asarray(hi) - np.asarray(lo)) / 2.0


def hoeffding_radius(value_range: float, samples: int, delta: float) -> float:
    """Two-sided Hoeffding half-width for the mean of ``samples`` draws in an interval of width ``value_range``."""
    if samples <= 0:
        return math.inf
    return math.sqrt(value_range ** 2 * math.log(2.0 / delta) / (2.0 * samples))


def mean_ci(total: float, total_sq: float, n: int) -> tuple[float, float]:
    """Mean and 95% normal half-width from running sums."""
    if n == 0:
        return math.nan, math.nan
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return mean, Z95 * math.sqrt(var / n)


def ratio_ci(num_mean: float, num_hw: float, den_mean: float, den_hw: float) -> tuple[float, float]:
    """Ratio and half-width by the delta method, treating both means as independent.

    Ignoring the (positive) covariance of paired samples only widens the interval.
    """
    if den_mean == 0:
        return math.nan, math.nan
    r = num_mean / den_mean
    rel = 0.0
    if num_mean != 0:
        rel += (num_hw / num_mean) ** 2
    rel += (den_hw / den_mean) ** 2
    hw = abs(r) * math.sqrt(rel)
    if num_mean == 0:
        hw = num_hw / abs(den_mean)
    return r, hw
