"""Closed-form tail bounds used as comparators."""
from __future__ import annotations

import math

import numpy as np

from ..errors import InputError


def scale(p, s: float) -> np.ndarray:
    """Coordinatewise p * e^{-s}."""
    if s < 0:
        raise InputError("scaling factor must be >= 0")
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise InputError("probabilities must lie in [0, 1]")
    return p * math.exp(-s)


def bound_new(s: float, t: float) -> float:
    """e^{-st} for s in (0, 1], t > 0."""
    if not 0 < s <= 1:
        raise InputError("s must lie in (0, 1]")
    if t <= 0:
        raise InputError("t must be > 0")
    return math.exp(-s * t)


def bound_chernoff(mean: float, delta: float) -> float:
    """Multiplicative Chernoff: Pr[X >= (1+delta) mean] <= exp(-delta^2 mean / (2 + delta))."""
    if delta <= 0:
        raise InputError("delta must be > 0")
    if mean < 0:
        raise InputError("mean must be >= 0")
    return math.exp(-delta * delta * mean / (2.0 + delta))


def bound_mcdiarmid(n: int, t: float) -> float:
    """McDiarmid with unit differences: exp(-2 t^2 / n)."""
    if t <= 0:
        raise InputError("t must be > 0")
    if n < 1:
        raise InputError("n must be >= 1")
    return math.exp(-2.0 * t * t / n)
