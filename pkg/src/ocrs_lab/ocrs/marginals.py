"""Marginal vectors with a convex-combination certificate of polytope membership."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..errors import InputError, InvariantError
from ..matroids.base import Matroid, as_subset

CERT_TOL = 1e-12


def default_b(k: int) -> float:
    """1 - sqrt(ln k / k), falling back to 1/2 where that leaves (0, 1) (k = 1)."""
    if k < 1:
        raise InputError("k must be >= 1")
    b = 1.0 - math.sqrt(math.log(k) / k)
    return b if 0.0 < b < 1.0 else 0.5


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(float(v))


@dataclass(frozen=True)
class MarginalVector:
    """``x = b * sum_i w_i 1[F_i]`` with every ``F_i`` independent and the weights summing to 1.

    The scale is held as an exact fraction so that repeated shrinking composes
    exactly; ``point`` is the unscaled convex combination.
    """

    point: np.ndarray
    scale: Fraction
    certificate: tuple[tuple[frozenset[int], float], ...]

    @property
    def b(self) -> float:
        return float(self.scale)

    @property
    def x(self) -> np.ndarray:
        return self.point * float(self.scale)

    @property
    def size(self) -> int:
        return int(self.point.shape[0])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.point > 0)

    @classmethod
    def from_certificate(cls, size: int, sets: Sequence[Iterable[int]], weights: Sequence[float],
                         b=1) -> "MarginalVector":
        if len(sets) != len(weights):
            raise InputError("certificate needs one weight per set")
        cert = []
        point = np.zeros(size, dtype=float)
        for s, w in zip(sets, weights):
            w = float(w)
            if w < 0:
                raise InputError("certificate weights must be >= 0")
            fs = as_subset(s, size)
            cert.append((fs, w))
            if fs:
                point[list(fs)] += w
        total = sum(w for _, w in cert)
        if abs(total - 1.0) > CERT_TOL * max(1, len(cert)):
            raise InputError(f"certificate weights sum to {total!r}, not 1")
        scale = _as_fraction(b)
        if not 0 < scale <= 1:
            raise InputError("scale b must lie in (0, 1]")
        np.clip(point, 0.0, 1.0, out=point)
        return cls(point, scale, tuple(cert))

    @classmethod
    def from_values(cls, x: Sequence[float], b, certificate: Sequence[tuple[Iterable[int], float]]) -> "MarginalVector":
        """Accept an explicit ``x`` and check it against the certificate to 1e-12."""
        x = np.asarray(x, dtype=float)
        mv = cls.from_certificate(x.shape[0], [s for s, _ in certificate], [w for _, w in certificate], b)
        if np.any(x < 0) or np.any(x > mv.b + CERT_TOL):
            raise InputError("every x_e must lie in [0, b]")
        err = float(np.max(np.abs(mv.x - x))) if x.size else 0.0
        if err > CERT_TOL:
            raise InputError(f"x differs from b * certificate by {err:.3g}")
        return mv

    def validate(self, m: Matroid) -> None:
        """Every certificate set must be independent in ``m``."""
        if m.size != self.size:
            raise InputError(f"marginal vector has {self.size} entries, matroid has {m.size}")
        for s, _ in self.certificate:
            if not m.is_independent(s):
                raise InputError(f"certificate set {sorted(s)[:8]}... is not independent")

    def shrink(self, factor) -> "MarginalVector":
        f = _as_fraction(factor)
        if not 0 < f <= 1:
            raise InputError("shrink factor must lie in (0, 1]")
        return MarginalVector(self.point, self.scale * f, self.certificate)

    def restrict(self, mapping: Sequence[int]) -> "MarginalVector":
        """Marginals on a sub-ground-set; ``mapping[i]`` is the parent index of local element ``i``."""
        local = {g: i for i, g in enumerate(mapping)}
        cert = []
        for s, w in self.certificate:
            cert.append((frozenset(local[g] for g in s if g in local), w))
        return MarginalVector(self.point[np.asarray(mapping, dtype=np.int64)], self.scale, tuple(cert))

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "size": self.size,
            "certificate": [{"set": sorted(s), "weight": w} for s, w in self.certificate],
        }


def uniform_cyclic(n: int, k: int, b, embed=None, size: int | None = None) -> MarginalVector:
    """x_e = b*k/n on n elements, certified by the n cyclic windows of length k (weight 1/n each).

    ``embed`` maps the window elements to indices of a larger ground set of ``size``.
    """
    if not 1 <= k <= n:
        raise InputError("need 1 <= k <= n")
    embed = embed or (lambda e: e)
    size = n if size is None else size
    sets = [[embed((i + j) % n) for j in range(k)] for i in range(n)]
    return MarginalVector.from_certificate(size, sets, [1.0 / n] * n, b)


def greedy_decompose(m: Matroid, y: Sequence[float], tol: float = 1e-12, max_sets: int = 10_000):
    """Peel weighted independent sets off ``y`` by repeated max-weight greedy on the residual.

    Returns ``(sets, weights, residual)`` where ``residual`` is the total mass
    left uncovered; it is zero exactly when the peeling certified ``y``.
    """
    r = np.array(y, dtype=float)
    if np.any(r < -tol) or np.any(r > 1 + tol):
        raise InputError("values must lie in [0, 1]")
    sets, weights = [], []
    remaining = 1.0
    for _ in range(max_sets):
        live = [int(e) for e in np.argsort(-r, kind="stable") if r[e] > tol]
        if not live or remaining <= tol:
            break
        chosen: list[int] = []
        for e in live:
            if m.rank(chosen + [e]) == len(chosen) + 1:
                chosen.append(e)
        lam = min(remaining, float(min(r[chosen])))
        sets.append(frozenset(chosen))
        weights.append(lam)
        r[chosen] -= lam
        remaining -= lam
    if remaining > tol:
        sets.append(frozenset())
        weights.append(remaining)
    residual = float(np.clip(r, 0, None).sum())
    return sets, weights, residual


def certify(m: Matroid, y: Sequence[float], tol_per_element: float = 1e-6) -> tuple[MarginalVector, float]:
    """Certify ``y`` by greedy peeling, scaling it down until the residual is small.

    Returns the certified vector (with b = 1) and the applied scale factor.
    """
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    factor = 1.0
    for _ in range(60):
        sets, weights, residual = greedy_decompose(m, y * factor)
        if residual <= tol_per_element * max(1, m.size):
            return MarginalVector.from_certificate(m.size, sets, weights, 1), factor
        factor *= 0.95
    raise InvariantError("could not certify the marginal vector even after scaling")


def sample_active(x: MarginalVector | Sequence[float], rng: np.random.Generator) -> frozenset[int]:
    """One Bernoulli draw per element, in element-index order."""
    xs = x.x if isinstance(x, MarginalVector) else np.asarray(x, dtype=float)
    u = rng.random(xs.shape[0])
    return frozenset(np.flatnonzero(u < xs).tolist())
