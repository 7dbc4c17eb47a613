"""Small explicit graph catalog: complete graphs, cycles, cages and projective-plane incidence graphs.

Graphs are ``(num_vertices, edges)`` with edges as vertex-index pairs.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path

from .errors import InputError

Graph = tuple[int, list[tuple[int, int]]]


def complete(n: int) -> Graph:
    return n, list(itertools.combinations(range(n), 2))


def cycle(n: int) -> Graph:
    return n, [(i, (i + 1) % n) for i in range(n)]


def lcf(n: int, shifts: list[int], repeats: int) -> Graph:
    """Hamiltonian cycle on n vertices plus chords given in LCF notation."""
    edges = {tuple(sorted((i, (i + 1) % n))) for i in range(n)}
    pattern = shifts * repeats
    if len(pattern) != n:
        raise InputError("LCF pattern length must equal the vertex count")
    for i, s in enumerate(pattern):
        edges.add(tuple(sorted((i, (i + s) % n))))
    return n, sorted(edges)


def petersen() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return 10, edges


def heawood() -> Graph:
    return lcf(14, [5, -5], 7)


def mcgee() -> Graph:
    return lcf(24, [12, 7, -7], 8)


class GaloisField:
    """GF(p^r) with elements encoded as integers (base-p digits = polynomial coefficients)."""

    def __init__(self, q: int):
        p, r = _prime_power(q)
        self.q, self.p, self.r = q, p, r
        self.modulus = _irreducible(p, r)
        self._mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]

    def _digits(self, a):
        return [(a // self.p ** i) % self.p for i in range(self.r)]

    def _encode(self, d):
        return sum(c * self.p ** i for i, c in enumerate(d))

    def add(self, a, b):
        return self._encode([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def _slow_mul(self, a, b):
        prod = [0] * (2 * self.r - 1)
        for i, x in enumerate(self._digits(a)):
            for j, y in enumerate(self._digits(b)):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        # Reduce modulo the monic irreducible polynomial.
        for deg in range(len(prod) - 1, self.r - 1, -1):
            c = prod[deg]
            if c:
                for i, m in enumerate(self.modulus):
                    prod[deg - self.r + i] = (prod[deg - self.r + i] - c * m) % self.p
        return self._encode(prod[: self.r])

    def mul(self, a, b):
        return self._mul[a][b]


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise InputError("field order must be >= 2")
    for p in range(2, q + 1):
        if q % p == 0:
            r, x = 0, q
            while x % p == 0:
                x //= p
                r += 1
            if x != 1:
                raise InputError(f"{q} is not a prime power")
            return p, r
    raise InputError(f"{q} is not a prime power")  # pragma: no cover


def _polymod_zero(num, den, p):
    num = list(num)
    while len(num) >= len(den):
        c = num[-1]
        if c:
            inv = pow(den[-1], p - 2, p)
            f = c * inv % p
            shift = len(num) - len(den)
            for i, d in enumerate(den):
                num[shift + i] = (num[shift + i] - f * d) % p
        num.pop()
    return not any(num)


def _irreducible(p: int, r: int) -> list[int]:
    """Lowest monic irreducible polynomial of degree r over GF(p), coefficients low to high."""
    if r == 1:
        return [0, 1]
    for coeffs in itertools.product(range(p), repeat=r):
        poly = list(coeffs) + [1]
        if poly[0] == 0:
            continue
        reducible = False
        for d in range(1, r // 2 + 1):
            for dc in itertools.product(range(p), repeat=d):
                if _polymod_zero(poly, list(dc) + [1], p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return poly
    raise InputError("no irreducible polynomial found")  # pragma: no cover


def projective_plane_incidence(q: int) -> Graph:
    """Point-line incidence graph of PG(2, q): points 0..N-1, lines N..2N-1, girth 6."""
    F = GaloisField(q)
    pts = []
    for v in itertools.product(range(q), repeat=3):
        nz = next((c for c in v if c), None)
        if nz == 1:
            pts.append(v)
    n = len(pts)
    edges = []
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            dot = 0
            for x, y in zip(a, b):
                dot = F.add(dot, F.mul(x, y))
            if dot == 0:
                edges.append((i, n + j))
    return 2 * n, edges


CATALOG = {
    "petersen": petersen,
    "heawood": heawood,
    "mcgee": mcgee,
    "k3": lambda: complete(3),
    "k4": lambda: complete(4),
    "k2": lambda: complete(2),
}


def by_name(name: str) -> Graph:
    """Resolve a catalog name such as ``petersen``, ``pg2-4``, ``k5`` or ``cycle-6``."""
    key = name.lower()
    if key in CATALOG:
        return CATALOG[key]()
    if key.startswith("pg2-"):
        return projective_plane_incidence(int(key[4:]))
    if key.startswith("cycle-"):
        return cycle(int(key[6:]))
    if key.startswith("k") and key[1:].isdigit():
        return complete(int(key[1:]))
    raise InputError(f"unknown graph {name!r}")


def load_graph(path: str | Path) -> Graph:
    """Graph file: JSON ``{"num_vertices": n, "edges": [[u, v], ...]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        n = int(data["num_vertices"])
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read graph file {path}: {exc}") from exc
    return n, edges


def graph_to_dict(g: Graph) -> dict:
    return {"num_vertices": g[0], "edges": [list(e) for e in g[1]]}
