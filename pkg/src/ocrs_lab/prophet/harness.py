"""Monte Carlo competitive ratios with deterministic chunked aggregation."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import InputError
from ..stats import mean_ci, ratio_ci
from ..streams import DEFAULT_CHUNK, map_chunks, substream
from .instance import GamblerSpec, ProphetInstance, accept_all_gambler, check_feasible, offline_opt_batch, threshold_gambler
from .reduction import ReductionPolicy


@dataclass
class RatioReport:
    policy: str
    alg_mean: float
    alg_hw: float
    opt_mean: float
    opt_hw: float
    ratio: float
    ratio_hw: float
    trials: int
    seed: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class _Sums:
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, v: np.ndarray):
        self.total += float(v.sum())
        self.total_sq += float((v * v).sum())

    def merge(self, other: "_Sums"):
        self.total += other.total
        self.total_sq += other.total_sq


def run_policies(inst: ProphetInstance, gamblers: Sequence[GamblerSpec], trials: int, *, seed: int,
                 reduction: ReductionPolicy | None = None, threads: int = 1, backend: str | None = None,
                 chunk: int = DEFAULT_CHUNK, verify: bool = True,
                 on_accept: Callable[[str, np.ndarray], dict] | None = None,
                 keep_trials: bool = False) -> tuple[dict, dict[str, RatioReport]]:
    """Sample ``trials`` realizations; every gambler and the offline optimum see the same values.

    ``on_accept(label, acc)`` may return per-chunk integer statistics, combined by maximum.
    With ``keep_trials`` the per-trial values are returned under ``"trial_values"``.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    for g in gamblers:
        if g.kind == "ocrs-reduction" and reduction is None:
            raise InputError("the ocrs-reduction gambler needs a built reduction policy")
        if g.kind not in ("greedy-threshold", "accept-all-feasible", "ocrs-reduction"):
            raise InputError(f"unknown gambler {g.kind!r}")
    n = inst.size

    def run(c, rows):
        values = inst.sample_values(substream(seed, "prophet-values", c).random((rows, n)))
        ties = substream(seed, "prophet-ties", c).random((rows, n))
        gate = substream(seed, "prophet-gate", c).random((rows, n))
        opt_v, _ = offline_opt_batch(inst.matroid, values, backend)
        opt = _Sums()
        opt.add(opt_v)
        out = {}
        kept = {"opt": opt_v} if keep_trials else None
        for g in gamblers:
            if g.kind == "greedy-threshold":
                acc = threshold_gambler(inst, values, g.threshold, backend)
            elif g.kind == "accept-all-feasible":
                acc = accept_all_gambler(inst, values, backend)
            else:
                acc = reduction.accept(values, ties, gate)
            if verify:
                check_feasible(inst.matroid, acc, backend)
            s = _Sums()
            got = (values * acc).sum(axis=1)
            s.add(got)
            if kept is not None:
                kept[g.label] = got
            stats = on_accept(g.label, acc) if on_accept else {}
            out[g.label] = (s, stats)
        return opt, out, kept

    parts = map_chunks(run, trials, threads, chunk)
    opt = _Sums()
    sums = {g.label: _Sums() for g in gamblers}
    stats: dict[str, dict] = {g.label: {} for g in gamblers}
    for o, out, _ in parts:
        opt.merge(o)
        for label, (s, st) in out.items():
            sums[label].merge(s)
            for key, v in st.items():
                stats[label][key] = max(stats[label].get(key, v), v)
    opt_mean, opt_hw = mean_ci(opt.total, opt.total_sq, trials)
    reports = {}
    for g in gamblers:
        s = sums[g.label]
        a_mean, a_hw = mean_ci(s.total, s.total_sq, trials)
        r, r_hw = ratio_ci(a_mean, a_hw, opt_mean, opt_hw)
        reports[g.label] = RatioReport(g.label, a_mean, a_hw, opt_mean, opt_hw, r, r_hw, trials, seed,
                                       dict(stats[g.label]))
    summary = {"opt_mean": opt_mean, "opt_hw": opt_hw, "trials": trials}
    if keep_trials:
        labels = ["opt"] + [g.label for g in gamblers]
        summary["trial_values"] = {lab: np.concatenate([p[2][lab] for p in parts]) for lab in labels}
    return summary, reports


def best_ratio(reports: dict[str, RatioReport]) -> RatioReport:
    return max(reports.values(), key=lambda r: (r.ratio if not math.isnan(r.ratio) else -1.0))
