"""Finite discrete value distributions, batched sampling and quantile gates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError

PROB_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise InputError("a distribution needs matching, non-empty value and probability lists")
        if any(not math.isfinite(v) or v < 0 for v in self.values):
            raise InputError("values must be finite and >= 0")
        if any(p < 0 for p in self.probs):
            raise InputError("probabilities must be >= 0")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise InputError(f"probabilities sum to {sum(self.probs)!r}, not 1")

    @classmethod
    def of(cls, pairs: Sequence[Sequence[float]]) -> "DiscreteDistribution":
        return cls(tuple(float(v) for v, _ in pairs), tuple(float(p) for _, p in pairs))

    @classmethod
    def point(cls, v: float) -> "DiscreteDistribution":
        return cls((float(v),), (1.0,))

    def mean(self) -> float:
        return float(sum(v * p for v, p in zip(self.values, self.probs)))

    def prob_above(self, t: float) -> float:
        return float(sum(p for v, p in zip(self.values, self.probs) if v > t))

    def prob_at(self, t: float) -> float:
        return float(sum(p for v, p in zip(self.values, self.probs) if v == t))

    def quantile_gate(self, x: float) -> tuple[float, float]:
        """Threshold ``tau`` and tie probability ``q`` with Pr[v > tau] + q Pr[v = tau] = x."""
        if x <= 0:
            return math.inf, 0.0
        x = min(x, 1.0)
        above = 0.0
        for v in sorted(set(self.values), reverse=True):
            at = self.prob_at(v)
            if above + at >= x - PROB_TOL or v == min(self.values):
                q = 1.0 if at == 0 else min(1.0, max(0.0, (x - above) / at))
                return v, q
            above += at
        raise AssertionError("unreachable")  # pragma: no cover

    def to_list(self) -> list[list[float]]:
        return [[v, p] for v, p in zip(self.values, self.probs)]


class ValueTable:
    """All element distributions padded into arrays for inverse-CDF sampling."""

    def __init__(self, dists: Sequence[DiscreteDistribution]):
        width = max(len(d.values) for d in dists)
        n = len(dists)
        self.values = np.zeros((n, width))
        cdf = np.ones((n, width))
        for i, d in enumerate(dists):
            w = len(d.values)
            self.values[i, :w] = d.values
            self.values[i, w:] = d.values[-1]
            cdf[i, :w] = np.cumsum(d.probs)
        cdf[:, -1] = 1.0
        # Only the interior break points matter; the last bucket absorbs rounding.
        self.breaks = cdf[:, :-1]

    def sample(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms ``(T, n)`` to values ``(T, n)``."""
        idx = (u[:, :, None] >= self.breaks[None, :, :]).sum(axis=2)
        return self.values[np.arange(self.values.shape[0])[None, :], idx]
