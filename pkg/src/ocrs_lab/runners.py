"""One pipeline per CLI subcommand; each writes its artifacts into a directory and returns a summary."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as C
from . import graphs
from .concentration import (CappedSum, CoordinateMax, MatroidRank, counterexample_starstar, default_grid,
                            occupancy_instance, spot_check, sweep, sweep_rows)
from .errors import InputError
from .generators import (SelectionSetup, graphic_catalog, hard_girth, overloaded_partition, uniform_prophet,
                         uniform_suite)
from .matroids import schema
from .matroids.families import GraphicMatroid
from .matroids.union import ExtendedKFoldUnion
from .ocrs import (ExpectationEstimator, MarginalVector, build_chain, default_b,
                   estimate_selectability, run_ocrs, uniform_cyclic)
from .output import write_csv, write_json
from .prophet import GamblerSpec, ProphetInstance, girth_lowerbound_report, ocrs_to_prophet, run_policies
from .prophet.hard import nonincreasing
from .streams import substream
from .verify import verify_oracles

DEFAULT_TRIALS = {
    "ocrs-select": 10_000,
    "prophet-ratio": 10_000,
    "girth-bound": 100_000,
    "concentration-sweep": 1_000_000,
}


@dataclass
class RunContext:
    seed: int
    trials: int
    threads: int
    out: Path
    backend: str | None = None
    exit_code: int = 0
    lines: list[str] = field(default_factory=list)


def _estimator(cfg: C.EstimatorConfig, ctx: RunContext) -> ExpectationEstimator:
    return ExpectationEstimator(mode=cfg.mode, samples=cfg.samples, delta=cfg.delta, policy=cfg.policy,
                                max_samples=cfg.max_samples, seed=ctx.seed, threads=ctx.threads,
                                backend=ctx.backend)


def selection_setup(cfg: C.OcrsSelectConfig) -> SelectionSetup:
    base = schema.load(cfg.matroid_file) if cfg.matroid_file else schema.from_dict(cfg.matroid)
    k = cfg.k
    b = default_b(k) if cfg.b == "auto" else float(cfg.b)
    scale = b if cfg.marginals.scale is None else cfg.marginals.scale
    size = base.size * k
    if cfg.marginals.generator == "uniform-cyclic":
        if base.size < k:
            raise InputError("uniform-cyclic needs at least k base elements")
        x = uniform_cyclic(base.size, k, scale, embed=lambda e: e * k, size=size)
    else:
        entries = cfg.marginals.certificate
        x = MarginalVector.from_certificate(size, [e.set for e in entries], [e.weight for e in entries], scale)
    mk = ExtendedKFoldUnion(base, k)
    x.validate(mk)
    return SelectionSetup(cfg.name, base, k, x, b, cfg.downsample, cfg.shrink)


def run_ocrs_select(cfg: C.OcrsSelectConfig, ctx: RunContext) -> dict:
    setup = selection_setup(cfg)
    mk = setup.mk
    est = _estimator(cfg.estimator, ctx)
    chain = build_chain(mk, setup.chain_marginals(), setup.b, est)
    report = estimate_selectability(mk, setup.marginals, chain, setup.b, ctx.trials, policy=cfg.order_policy,
                                    orders=cfg.orders, seed=ctx.seed, threads=ctx.threads,
                                    downsample=setup.downsample, shrink=setup.shrink, backend=ctx.backend)
    write_csv(ctx.out / "selectability.csv", ["element", "actives", "accepts", "rate", "ci_lo", "ci_hi"],
              report.rows())
    summary = {
        "name": setup.name,
        "k": setup.k,
        "b": setup.b,
        "downsample": setup.downsample,
        "shrink": setup.shrink,
        "chain": chain.summary(),
        "selectability": report.summary(),
    }
    if setup.k > 1:
        summary["target"] = 1.0 - 3.0 * math.sqrt(math.log(setup.k) / setup.k)
    write_json(ctx.out / "chain.json", summary)
    if cfg.run_logs:
        support = setup.marginals.support().tolist()
        with (ctx.out / "runlogs.jsonl").open("w", encoding="utf-8") as fh:
            for t in range(cfg.run_logs):
                log = run_ocrs(mk, setup.marginals, chain, support, setup.b, seed=ctx.seed, trial=t,
                               downsample=setup.downsample, shrink=setup.shrink)
                fh.write(log.to_json() + "\n")
    lo, hi = report.min_ci
    ctx.lines.append(f"chain levels {chain.summary()['level_sizes']}")
    ctx.lines.append(f"min selectability {report.min_rate:.4f} (95% CI {lo:.4f}..{hi:.4f}) over {ctx.trials} trials")
    return summary


def _instance(cfg: C.ProphetRatioConfig) -> ProphetInstance:
    if cfg.instance_file:
        return ProphetInstance.load(cfg.instance_file)
    return ProphetInstance.from_dict(cfg.instance)


def run_prophet_ratio(cfg: C.ProphetRatioConfig, ctx: RunContext) -> dict:
    inst = _instance(cfg)
    gamblers = [GamblerSpec(g.kind, g.threshold) for g in cfg.gamblers]
    labels = [g.label for g in gamblers]
    if len(set(labels)) != len(labels):
        raise InputError("duplicate gamblers in config")
    reduction = None
    if any(g.kind == "ocrs-reduction" for g in gamblers):
        red = cfg.reduction
        reduction = ocrs_to_prophet(inst, samples=red.samples, b=None if red.b == "auto" else red.b,
                                    estimator=_estimator(red.estimator, ctx), seed=ctx.seed, threads=ctx.threads,
                                    backend=ctx.backend)
    opt, reports = run_policies(inst, gamblers, ctx.trials, seed=ctx.seed, reduction=reduction,
                                threads=ctx.threads, backend=ctx.backend, keep_trials=cfg.trial_table)
    values = opt.pop("trial_values", None)
    write_csv(ctx.out / "ratios.csv", ["policy", "alg_mean", "alg_hw", "opt_mean", "opt_hw", "ratio", "ratio_hw",
                                       "trials"],
              ([r.policy, r.alg_mean, r.alg_hw, r.opt_mean, r.opt_hw, r.ratio, r.ratio_hw, r.trials]
               for r in reports.values()))
    if values is not None:
        cols = ["opt"] + labels
        write_csv(ctx.out / "trials.csv", ["trial"] + cols,
                  ([t] + [values[c][t] for c in cols] for t in range(ctx.trials)))
    summary = {"opt": opt, "reports": {k: v.to_dict() for k, v in reports.items()},
               "reduction": reduction.summary() if reduction else None}
    write_json(ctx.out / "ratio.json", summary)
    ctx.lines.append(f"E[OPT] = {opt['opt_mean']:.4f} +- {opt['opt_hw']:.4f}")
    for r in reports.values():
        ctx.lines.append(f"{r.policy}: ratio {r.ratio:.4f} +- {r.ratio_hw:.4f}")
    return summary


GIRTH_COLUMNS = ["graph", "eps", "n", "m", "girth_source", "girth_split", "opt_mean", "opt_hw", "opt_lower_bound",
                 "opt_rel_gap", "online_ceiling", "ratio_ceiling", "uninformative", "best_policy", "best_ratio",
                 "best_ratio_hw", "within_ceiling", "pairs_ok"]


def run_girth_bound(cfg: C.GirthBoundConfig, ctx: RunContext) -> dict:
    named = [(name, graphs.by_name(name)) for name in cfg.graphs]
    named += [(Path(p).stem, graphs.load_graph(p)) for p in cfg.graph_files]
    if not named:
        raise InputError("girth-bound needs at least one graph")
    named.sort(key=lambda item: (len(item[1][1]), item[0]))
    rows, trends = [], {}
    for eps in cfg.eps:
        got = girth_lowerbound_report(named, eps, ctx.trials, seed=ctx.seed,
                                      reduction_samples=cfg.reduction_samples,
                                      estimator_samples=cfg.estimator_samples, threads=ctx.threads,
                                      backend=ctx.backend)
        for r in got:
            r["opt_rel_gap"] = (r["opt_mean"] - r["opt_lower_bound"]) / r["opt_lower_bound"]
        rows += got
        trends[repr(eps)] = {
            "graphs": [r["graph"] for r in got],
            "best_ratio": [r["best_ratio"] for r in got],
            "nonincreasing": nonincreasing([r["best_ratio"] for r in got], [r["best_ratio_hw"] for r in got]),
        }
    write_csv(ctx.out / "girth.csv", GIRTH_COLUMNS, ([r[c] for c in GIRTH_COLUMNS] for r in rows))
    write_csv(ctx.out / "ratios.csv", ["graph", "eps", "policy", "alg_mean", "alg_hw", "ratio", "ratio_hw",
                                       "max_double_pairs"],
              ([r["graph"], r["eps"], p, v["alg_mean"], v["alg_hw"], v["ratio"], v["ratio_hw"],
                v["extra"].get("max_double_pairs", 0)] for r in rows for p, v in r["reports"].items()))
    summary = {"rows": rows, "trends": trends}
    write_json(ctx.out / "girth.json", summary)
    for r in rows:
        ctx.lines.append(f"{r['graph']} eps={r['eps']}: girth {r['girth_source']}->{r['girth_split']}, "
                         f"OPT {r['opt_mean']:.2f} vs m(2-eps) {r['opt_lower_bound']:.2f}, "
                         f"best {r['best_policy']} {r['best_ratio']:.4f}")
    return summary


def _function(fc: C.FunctionConfig):
    if fc.kind == "capped-sum":
        f = CappedSum(fc.dim, fc.dim if fc.cap is None else fc.cap)
        return f, np.full(fc.dim, fc.p)
    if fc.kind == "max":
        return CoordinateMax(fc.dim), np.full(fc.dim, fc.p)
    if fc.kind == "occupancy":
        f, p = occupancy_instance(fc.k, fc.base_elements, fc.capacity, fc.p)
        if f.dim > 50_000:
            raise InputError("occupancy functions are limited to 50000 coordinates")
        return f, p
    m = GraphicMatroid(*graphs.by_name(fc.graph))
    f = MatroidRank(m)
    return f, np.full(f.dim, fc.p)


def run_concentration(cfg: C.ConcentrationConfig, ctx: RunContext) -> dict:
    grid = [tuple(g) for g in cfg.grid] if cfg.grid else default_grid(cfg.grid_k)
    rows, checks = [], []
    for i, fc in enumerate(cfg.functions):
        f, p = _function(fc)
        f.name = f"{fc.kind}-{i}"
        est = sweep(f, p, grid, ctx.trials, seed=ctx.seed, mean_samples=cfg.mean_samples, threads=ctx.threads)
        rows += sweep_rows(f, est)
        sc = spot_check(f, p, substream(ctx.seed, "spot-check", i))
        checks.append({"function": f.name, "dim": f.dim, "monotone_violations": sc.monotone_violations,
                       "lipschitz_violations": sc.lipschitz_violations, "pairs": sc.pairs, "flips": sc.flips})
    cols = ["function", "s", "t", "bound_new", "bound_mcdiarmid", "empirical", "ci_lo", "ci_hi", "N", "mean_hat",
            "within_bound"]
    write_csv(ctx.out / "sweep.csv", cols, ([r[c] for c in cols] for r in rows))
    failures = sum(not r["within_bound"] for r in rows)
    summary = {"grid": grid, "grid_points": len(rows), "failures": failures, "spot_checks": checks}
    write_json(ctx.out / "sweep.json", summary)
    ctx.lines.append(f"{len(rows)} grid points, {failures} above the bound beyond slack")
    if cfg.counterexample is not None:
        ce = cfg.counterexample
        rep = counterexample_starstar(ce.n, ce.k, ce.samples, seed=ctx.seed, threads=ctx.threads)
        write_json(ctx.out / "counterexample.json", rep.to_dict())
        summary["counterexample"] = rep.to_dict()
        ctx.lines.append(f"counterexample: mean {rep.mean_hat:.3f}, Pr[f >= k] {rep.tail_hat:.4f} "
                         f"(exact {rep.tail_exact:.4f})")
    return summary


def run_gen_instance(cfg: C.GenInstanceConfig, ctx: RunContext) -> dict:
    params = cfg.typed_params()
    written = []

    def put(name, obj):
        write_json(ctx.out / name, obj)
        written.append(name)

    if cfg.family == "uniform-suite":
        setup = uniform_suite(params.k, params.n, params.b)
        put("ocrs_select.json", setup.to_config())
        n = setup.base.size
        put("prophet_instance.json", uniform_prophet(params.k, n, params.eps).to_dict())
    elif cfg.family == "overloaded-partition":
        setup = overloaded_partition(params.blocks, params.b)
        put("ocrs_select.json", setup.to_config())
    elif cfg.family == "graphic-catalog":
        setup = graphic_catalog(params.graph, params.k, params.b, params.forests, seed=ctx.seed)
        put("ocrs_select.json", setup.to_config())
        put("graph.json", graphs.graph_to_dict(graphs.by_name(params.graph)))
    else:
        hard = hard_girth(params.graph, params.eps)
        put("prophet_instance.json", hard.instance.to_dict())
        put("graph.json", graphs.graph_to_dict(hard.source))
        put("hard_girth.json", {
            "graph": params.graph, "eps": params.eps, "n": hard.n, "m": hard.m,
            "edges": hard.instance.size, "girth_source": hard.girth_source, "girth_split": hard.girth_split,
            "opt_lower_bound": hard.opt_lower_bound(), "online_ceiling": hard.online_ceiling(),
            "ratio_ceiling": hard.ratio_ceiling(),
        })
    ctx.lines.append(f"{cfg.family}: wrote {', '.join(written)}")
    return {"family": cfg.family, "params": params.model_dump(), "files": written}


def run_verify(cfg: C.VerifyOraclesConfig, ctx: RunContext) -> dict:
    report = verify_oracles(cfg.corpus, cfg.max_k, tuple(cfg.occupancy_ks), cfg.occupancy_max_n)
    write_json(ctx.out / "oracles.json", report)
    failed = [c for c in report["checks"] if not c["ok"]]
    for c in failed:
        ctx.lines.append(f"MISMATCH {c['check']} {c['matroid']} k={c['k']}: {c['mismatches']} of {c['cases']}")
    ctx.lines.append(report["message"])
    if failed:
        ctx.exit_code = 4
    return report


RUNNERS = {
    "ocrs-select": run_ocrs_select,
    "prophet-ratio": run_prophet_ratio,
    "girth-bound": run_girth_bound,
    "concentration-sweep": run_concentration,
    "gen-instance": run_gen_instance,
    "verify-oracles": run_verify,
}
