"""The layered greedy OCRS: single logged runs and batched selectability estimates.

Every trial draws, per support element in index order, an activity uniform
from one substream and a gate uniform from a dedicated second substream.  An
element is a candidate when it is active and its gate uniform falls below the
keep probability (the down-sample ``e^{-(1-b)}``, times an optional shrink
factor).  Candidates at level j are accepted iff they lie outside
span(A_j ∪ N_{j+1}), where A_j collects earlier acceptances at that level.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import kernels
from ..errors import ContractViolation, InputError, InvariantError
from ..matroids.families import edge_view
from ..matroids.union import ExtendedKFoldUnion
from ..stats import wilson
from ..streams import DEFAULT_CHUNK, map_chunks, substream
from .marginals import MarginalVector
from .protection import ChainDecomposition

ORDER_POLICIES = ("fixed", "reverse", "uniform-random", "worst-of-list")


def keep_probability(b: float, downsample: bool = True, shrink: float | None = None) -> float:
    p = math.exp(-(1.0 - b)) if downsample else 1.0
    if shrink is not None:
        p *= float(shrink)
    return p


def _x_of(x) -> np.ndarray:
    return x.x if isinstance(x, MarginalVector) else np.asarray(x, dtype=float)


class LayeredPlan:
    """Per-support-element level assignment plus whatever the chosen kernel needs."""

    def __init__(self, mk: ExtendedKFoldUnion, chain: ChainDecomposition, x, backend: str | None = None):
        xs = _x_of(x)
        if xs.shape[0] != mk.size:
            raise ContractViolation("marginal vector does not match the matroid")
        self.mk = mk
        self.chain = chain
        self.backend = backend
        self.x = xs
        self.support = np.flatnonzero(xs > 0)
        loops = [int(i) for i in self.support if mk.rank([int(i)]) == 0]
        if loops:
            raise InputError(f"loop elements cannot carry positive probability: {loops[:10]}")
        levels = chain.level_array(mk.size)
        self.level = levels[self.support]
        if np.any(self.level < 0):
            raise InvariantError("some support element lies in no level gap")
        L = max(chain.length, 1)
        self.n_levels = L
        ps = mk.partition_structure()
        view = edge_view(mk.base) if mk.k == 1 else None
        if ps is not None:
            self.kind = "partition"
            self.block = ps.block[self.support]
            self.cap = ps.capacity
            self.base_count = np.zeros((L, ps.n_blocks), dtype=np.int64)
            for j in range(chain.length):
                nxt = sorted(chain.levels[j + 1])
                if nxt:
                    self.base_count[j] = np.bincount(ps.block[nxt], minlength=ps.n_blocks)
        elif view is not None:
            self.kind = "graphic"
            nv, eu, ev = view
            self.eu, self.ev = eu[self.support], ev[self.support]
            self.init_parent = np.stack([
                kernels.forest_parent(nv, eu, ev, sorted(chain.levels[j + 1]) if j < chain.length else [])
                for j in range(L)])
            self.num_vertices = nv
        else:
            self.kind = "generic"
            self.protected = [chain.levels[j + 1] for j in range(chain.length)]

    @property
    def P(self) -> int:
        return int(self.support.shape[0])

    def run(self, order: np.ndarray, cand: np.ndarray) -> np.ndarray:
        """Acceptance matrix ``(T, P)`` for support-position orders and candidate flags."""
        if self.kind == "partition":
            return kernels.level_greedy_partition(self.block, self.level, self.base_count, self.cap, order, cand,
                                                  backend=self.backend)
        if self.kind == "graphic":
            return kernels.level_greedy_graphic(self.eu, self.ev, self.level, self.init_parent, order, cand,
                                                backend=self.backend)
        return self._run_generic(order, cand)

    def _run_generic(self, order, cand):
        T = order.shape[0]
        acc = np.zeros((T, self.P), dtype=np.uint8)
        for t in range(T):
            accepted = [set() for _ in range(self.n_levels)]
            for p in order[t]:
                if not cand[t, p]:
                    continue
                e = int(self.support[p])
                j = int(self.level[p])
                if not self.mk.in_span(e, accepted[j] | self.protected[j]):
                    accepted[j].add(e)
                    acc[t, p] = 1
        return acc

    def feasible(self, acc: np.ndarray) -> np.ndarray:
        """Per-row independence of the accepted set in the full matroid."""
        acc = np.asarray(acc, dtype=bool)
        if self.kind == "partition":
            onehot = np.zeros((self.P, self.cap.shape[0]), dtype=np.int64)
            onehot[np.arange(self.P), self.block] = 1
            return np.all(acc.astype(np.int64) @ onehot <= self.cap, axis=1)
        if self.kind == "graphic":
            ident = np.arange(self.num_vertices, dtype=np.int64)[None, :]
            order = np.tile(np.arange(self.P, dtype=np.int64), (acc.shape[0], 1))
            again = kernels.level_greedy_graphic(self.eu, self.ev, np.zeros(self.P, dtype=np.int64), ident,
                                                 order, acc, backend=self.backend)
            return np.all(again.astype(bool) == acc, axis=1)
        return np.array([self.mk.is_independent(self.support[row].tolist()) for row in acc], dtype=bool)


@dataclass
class LogEntry:
    element: int
    active: bool
    kept: bool
    level: int
    accepted: bool


@dataclass
class OcrsRunLog:
    order: list[int]
    entries: list[LogEntry]
    accepted: list[int]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "entries": [[e.element, int(e.active), int(e.kept), e.level, int(e.accepted)] for e in self.entries],
            "accepted": self.accepted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)


def run_ocrs(mk: ExtendedKFoldUnion, x, chain: ChainDecomposition, order: Sequence[int], b: float, *,
             seed: int = 0, trial: int = 0, downsample: bool = True, shrink: float | None = None,
             active=None, gate=None) -> OcrsRunLog:
    """One online pass with a full log; the accepted set is checked for independence after each acceptance.

    ``active`` (set of elements) and ``gate`` (per-element uniforms) override the seeded draws.
    """
    xs = _x_of(x)
    order = [int(e) for e in order]
    if len(set(order)) != len(order) or any(not 0 <= e < mk.size for e in order):
        raise InputError("arrival order must list distinct elements of the ground set")
    support = set(np.flatnonzero(xs > 0).tolist())
    if not support <= set(order):
        raise InputError("arrival order must include every element with positive probability")
    if active is None:
        u = substream(seed, "ocrs-run", trial, "active").random(mk.size)
        active = set(np.flatnonzero(u < xs).tolist())
    if gate is None:
        gate = substream(seed, "ocrs-run", trial, "gate").random(mk.size)
    keep = keep_probability(b, downsample, shrink)
    levels = chain.level_array(mk.size)
    protected = [chain.levels[j + 1] for j in range(chain.length)]
    per_level: list[set[int]] = [set() for _ in range(max(chain.length, 1))]
    accepted: list[int] = []
    entries = []
    for e in order:
        is_active = e in active
        kept = bool(is_active and gate[e] < keep)
        j = int(levels[e])
        ok = False
        if kept:
            if j < 0:
                raise InvariantError(f"element {e} lies in no level gap")
            if mk.rank([e]) == 0:
                raise InputError(f"loop element {e} cannot be active")
            ok = not mk.in_span(e, per_level[j] | protected[j])
            if ok:
                per_level[j].add(e)
                accepted.append(e)
                if not mk.is_independent(accepted):
                    raise InvariantError("accepted set became dependent")
        entries.append(LogEntry(e, is_active, kept, j, ok))
    return OcrsRunLog(order, entries, sorted(accepted))


@dataclass
class SelectabilityReport:
    elements: np.ndarray
    actives: np.ndarray
    accepts: np.ndarray
    trials: int
    policy: str
    per_order_min: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.rate = np.where(self.actives > 0, self.accepts / np.maximum(self.actives, 1), np.nan)
        self.ci_lo, self.ci_hi = wilson(self.accepts, self.actives)
        self.ci_lo = np.atleast_1d(self.ci_lo)
        self.ci_hi = np.atleast_1d(self.ci_hi)

    @property
    def defined(self) -> np.ndarray:
        return self.actives > 0

    @property
    def argmin(self) -> int | None:
        if not self.defined.any():
            return None
        idx = np.flatnonzero(self.defined)
        return int(idx[np.argmin(self.rate[idx])])

    @property
    def min_rate(self) -> float:
        i = self.argmin
        return math.nan if i is None else float(self.rate[i])

    @property
    def min_ci(self) -> tuple[float, float]:
        i = self.argmin
        return (math.nan, math.nan) if i is None else (float(self.ci_lo[i]), float(self.ci_hi[i]))

    def rows(self):
        for i, e in enumerate(self.elements):
            yield (int(e), int(self.actives[i]), int(self.accepts[i]), self.rate[i], self.ci_lo[i], self.ci_hi[i])

    def summary(self) -> dict:
        lo, hi = self.min_ci
        return {
            "policy": self.policy,
            "trials": self.trials,
            "min_rate": self.min_rate,
            "min_ci": [lo, hi],
            "min_element": None if self.argmin is None else int(self.elements[self.argmin]),
            "per_order_min": self.per_order_min,
            "warnings": self.warnings,
        }


def _support_orders(plan: LayeredPlan, orders) -> list[np.ndarray]:
    pos = {int(e): i for i, e in enumerate(plan.support)}
    out = []
    for order in orders:
        seq = [pos[int(e)] for e in order if int(e) in pos]
        if sorted(seq) != list(range(plan.P)):
            raise InputError("each arrival order must cover every element with positive probability")
        out.append(np.array(seq, dtype=np.int64))
    return out


def simulate(plan: LayeredPlan, trials: int, *, seed: int, keep: float, policy: str = "fixed",
             orders=None, threads: int = 1, chunk: int = DEFAULT_CHUNK, verify: bool = True,
             module: str = "ocrs") -> tuple[np.ndarray, list[np.ndarray]]:
    """Run ``trials`` online passes; returns active counts and accept counts (one array per order)."""
    if policy not in ORDER_POLICIES:
        raise InputError(f"order policy must be one of {ORDER_POLICIES}")
    P = plan.P
    if orders is None:
        if policy == "worst-of-list":
            by_x = np.argsort(-plan.x[plan.support], kind="stable")
            seqs = [np.arange(P), np.arange(P)[::-1], by_x]
        elif policy == "reverse":
            seqs = [np.arange(P)[::-1]]
        else:
            seqs = [np.arange(P)]
    else:
        seqs = _support_orders(plan, orders)
    xs = plan.x[plan.support]

    def run(c, rows):
        active = substream(seed, f"{module}-active", c).random((rows, P)) < xs
        gate = substream(seed, f"{module}-gate", c).random((rows, P)) < keep
        cand = active & gate
        results = []
        if policy == "uniform-random":
            rng = substream(seed, f"{module}-order", c)
            order_sets = [rng.permuted(np.tile(np.arange(P, dtype=np.int64), (rows, 1)), axis=1)]
        else:
            order_sets = [np.tile(s, (rows, 1)) for s in seqs]
        for order in order_sets:
            acc = plan.run(order, cand)
            if verify and not plan.feasible(acc).all():
                raise InvariantError("an accepted set was dependent")
            results.append(acc.sum(axis=0, dtype=np.int64))
        return active.sum(axis=0, dtype=np.int64), results

    parts = map_chunks(run, trials, threads, chunk)
    actives = np.zeros(P, dtype=np.int64)
    accepts = None
    for a, accs in parts:
        actives += a
        accepts = [x.copy() for x in accs] if accepts is None else [s + x for s, x in zip(accepts, accs)]
    if accepts is None:
        accepts = [np.zeros(P, dtype=np.int64) for _ in (seqs if policy != "uniform-random" else [0])]
    return actives, accepts


def estimate_selectability(mk: ExtendedKFoldUnion, x, chain: ChainDecomposition, b: float, trials: int, *,
                           policy: str = "fixed", orders=None, seed: int = 0, threads: int = 1,
                           downsample: bool = True, shrink: float | None = None, backend: str | None = None,
                           verify: bool = True, chunk: int = DEFAULT_CHUNK) -> SelectabilityReport:
    """Per-element Pr[accepted | active] with 95% Wilson intervals.

    With ``worst-of-list`` every order in the list sees the same draws and each
    element reports its worst order.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    plan = LayeredPlan(mk, chain, x, backend)
    keep = keep_probability(b, downsample, shrink)
    actives, accepts = simulate(plan, trials, seed=seed, keep=keep, policy=policy, orders=orders,
                                threads=threads, chunk=chunk, verify=verify)
    per_order_min = []
    safe = np.maximum(actives, 1)
    for acc in accepts:
        rates = np.where(actives > 0, acc / safe, np.inf)
        per_order_min.append(float(rates.min()) if (actives > 0).any() else math.nan)
    stacked = np.stack(accepts)
    worst = stacked[np.argmin(stacked, axis=0), np.arange(plan.P)] if plan.P else np.zeros(0, dtype=np.int64)
    notes = []
    never = plan.support[actives == 0]
    if never.size:
        msg = f"{never.size} elements were never active; their rate is undefined and excluded from the minimum"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return SelectabilityReport(plan.support.copy(), actives, worst, trials, policy, per_order_min, notes)
