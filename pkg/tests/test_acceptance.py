"""Acceptance gate: one test and one verdict line per criterion, each at its stated scale and tolerance."""
import json
import math
import time

import numpy as np
import pytest
import yaml

from ocrs_lab import graphs
from ocrs_lab.cli import main
from ocrs_lab.concentration import counterexample_starstar, default_grid, occupancy_instance, sweep
from ocrs_lab.concentration.functions import CappedSum, CoordinateMax
from ocrs_lab.generators import overloaded_partition, uniform_suite
from ocrs_lab.matroids import GraphicMatroid, PartitionMatroid, UniformMatroid, extend_kfold, occupancy_batch
from ocrs_lab.matroids.brute import brute_extended_ranks
from ocrs_lab.matroids.catalog import small_corpus
from ocrs_lab.ocrs import ExpectationEstimator, MarginalVector, build_chain, estimate_selectability, kfold_protect
from ocrs_lab.prophet import girth_lowerbound_report
from ocrs_lab.prophet.hard import nonincreasing
from ocrs_lab.verify import verify_oracles

pytestmark = pytest.mark.acceptance

CORPUS = small_corpus()


def verdict(report_line, number, ok, detail, started):
    report_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{time.time() - started:.1f}s]")


def all_masks(n):
    return ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)


@pytest.fixture(scope="module")
def oracle_report():
    t0 = time.time()
    rep = verify_oracles()
    rep["elapsed"] = time.time() - t0
    return rep


def test_c01_oracle_equivalence(oracle_report, report_line):
    t0 = time.time() - oracle_report["elapsed"]
    rep = oracle_report
    kinds = ("union-rank", "kfold-union-rank", "extended-rank-classes", "extended-rank-subsets", "first-copies-union")
    checks = [c for c in rep["checks"] if c["check"] in kinds]
    small = [name for name in rep["matroids"] if CORPUS[name].size <= 8]
    bad = sum(c["mismatches"] for c in checks)
    ks = sorted({c["k"] for c in checks})
    ok = bad == 0 and len(small) >= 10 and ks == [1, 2, 3]
    verdict(report_line, 1, ok, f"{len(small)} matroids, k in {ks}, {sum(c['cases'] for c in checks)} cases, "
                                f"{bad} mismatches", t0)
    assert ok


def test_c02_uniform_occupancy(oracle_report, report_line):
    t0 = time.time()
    checks = [c for c in oracle_report["checks"] if c["check"] == "uniform-occupancy"]
    covered = sorted({(c["k"], c["matroid"]) for c in checks})
    bad = sum(c["mismatches"] for c in checks)
    ok = bad == 0 and {c["k"] for c in checks} == {2, 3, 5} and len(covered) == 18
    verdict(report_line, 2, ok, f"{len(covered)} (k, n) pairs, {sum(c['cases'] for c in checks)} cases, "
                                f"{bad} mismatches", t0)
    assert ok


def _exhaustive_properties(mk):
    """Violations of the three occupancy properties over every subset of a small extended union."""
    X = all_masks(mk.size)
    rank = mk.rank_batch(X)
    codes = np.arange(1 << mk.size)
    bad = 0
    for e in range(mk.base.size):
        occ = occupancy_batch(mk, e, X)
        for a in range(mk.size):
            without = (codes >> a) & 1 == 0
            step = occ[codes[without] | (1 << a)] - occ[without]
            bad += int(np.count_nonzero((step < 0) | (step > 1)))
        low = occ < mk.k
        for i in mk.group(e):
            minus = codes & ~(1 << i)
            spanned = rank[minus | (1 << i)] == rank[minus]
            bad += int(np.count_nonzero(low & spanned))
    return bad, (1 << mk.size) * mk.base.size


def _random_properties(mk, samples, rng):
    """Random S ⊆ T pairs, single additions and the span implication, checked through rank_batch."""
    n = mk.size
    fill = rng.random((samples, 1))
    S = rng.random((samples, n)) < fill
    T = S | (rng.random((samples, n)) < rng.random((samples, 1)) * 0.3)
    a = rng.integers(0, n, samples)
    Sa = S.copy()
    Sa[np.arange(samples), a] = True
    e = rng.integers(0, mk.base.size, samples)
    bad = 0
    for base_e in np.unique(e):
        rows = np.flatnonzero(e == base_e)
        occ_s = occupancy_batch(mk, int(base_e), S[rows])
        occ_t = occupancy_batch(mk, int(base_e), T[rows])
        occ_a = occupancy_batch(mk, int(base_e), Sa[rows])
        bad += int(np.count_nonzero(occ_s > occ_t))
        d = occ_a - occ_s
        bad += int(np.count_nonzero((d < 0) | (d > 1)))
        low = occ_s < mk.k
        for i in mk.group(int(base_e)):
            minus = S[rows].copy()
            minus[:, i] = False
            plus = minus.copy()
            plus[:, i] = True
            spanned = mk.rank_batch(plus) == mk.rank_batch(minus)
            bad += int(np.count_nonzero(low & spanned))
    return bad


def test_c03_occupancy_properties(report_line):
    t0 = time.time()
    bad = cases = instances = 0
    for name, m in sorted(CORPUS.items()):
        for k in (1, 2, 3):
            if m.size * k <= 12:
                b, c = _exhaustive_properties(extend_kfold(m, k))
                bad += b
                cases += c
                instances += 1
    rng = np.random.default_rng(2024)
    random_cases = 0
    larger = [
        (PartitionMatroid([[0, 1, 2, 3], [4, 5, 6], [7, 8]], [2, 1, 1]), 5, 30_000),
        (PartitionMatroid([[0, 1, 2, 3, 4, 5]], [3]), 10, 30_000),
        (UniformMatroid(8, 2), 16, 20_000),
        (PartitionMatroid([[0, 1], [2, 3], [4, 5], [6, 7], [8, 9]], [1, 1, 1, 1, 1]), 8, 15_000),
        (GraphicMatroid(*graphs.complete(4)), 3, 3000),
        (GraphicMatroid(*graphs.by_name("petersen")), 2, 2000),
    ]
    for base, k, n in larger:
        bad += _random_properties(extend_kfold(base, k), n, rng)
        random_cases += n
    ok = bad == 0 and random_cases >= 100_000
    verdict(report_line, 3, ok, f"{instances} exhaustive unions ({cases} subset/element cases), "
                                f"{random_cases} random samples, {bad} violations", t0)
    assert ok


def _random_base(rng):
    kind = int(rng.integers(0, 5))
    if kind == 0:
        n = int(rng.integers(2, 6))
        return UniformMatroid(n, int(rng.integers(1, n)))
    if kind == 1:
        sizes = rng.integers(1, 4, int(rng.integers(1, 3)))
        blocks, c = [], 0
        for s in sizes:
            blocks.append(list(range(c, c + int(s))))
            c += int(s)
        return PartitionMatroid(blocks, [int(rng.integers(1, len(b) + 1)) for b in blocks])
    if kind == 2:
        name = str(rng.choice(["k3", "k4", "c4", "k4-e", "multi"]))
        edges = {"k3": graphs.complete(3)[1], "k4": graphs.complete(4)[1], "c4": [(0, 1), (1, 2), (2, 3), (3, 0)],
                 "k4-e": [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], "multi": [(0, 1), (0, 1), (1, 2), (0, 2)]}[name]
        return GraphicMatroid(4 if name != "k3" else 3, edges)
    if kind == 3:
        return CORPUS[str(rng.choice(["explicit-u24", "explicit-fano", "partition-112"]))]
    return PartitionMatroid([[0, 1, 2]], [2])


def _random_instance(rng):
    while True:
        base = _random_base(rng)
        kmax = 12 // base.size
        if kmax >= 1:
            break
    k = int(rng.integers(1, min(kmax, 3) + 1))
    mk = extend_kfold(base, k)
    # seeding every set with all copies of one element makes protection bite more often
    seed_set = []
    if rng.random() < 0.4:
        group = sorted(mk.group(int(rng.integers(0, base.size))))
        if mk.is_independent(group):
            seed_set = group
    sets = []
    for _ in range(int(rng.integers(1, 4))):
        F = list(seed_set)
        for e in rng.permutation(mk.size):
            if int(e) not in F and mk.is_independent(F + [int(e)]):
                F.append(int(e))
        sets.append(F)
    weights = rng.dirichlet(np.ones(len(sets)))
    b = float(rng.uniform(0.3, 0.95))
    return mk, MarginalVector.from_certificate(mk.size, sets, weights, b), b


def _enumerated_occupancy(mk, x, S, table):
    """E[occ_e(R ∪ S)] for every base element, by summing over all realizations of R."""
    support = np.flatnonzero(x.x > 0)
    p = x.x[support]
    X = all_masks(len(support))
    prob = np.prod(np.where(X, p, 1 - p), axis=1)
    codes = (X.astype(np.int64) << support[None, :].astype(np.int64)).sum(axis=1)
    smask = sum(1 << i for i in S)
    codes = codes | smask
    table = np.asarray(table)
    out = {}
    for e in range(mk.base.size):
        g = sum(1 << i for i in mk.group(e))
        occ = mk.k - table[codes | g] + table[codes]
        out[e] = float(prob @ occ)
    return out


def test_c04_protection_properness(report_line):
    t0 = time.time()
    rng = np.random.default_rng(7)
    tables = {}
    est = ExpectationEstimator(mode="exact")
    bad = nonempty = survivors = 0
    instances = 0
    for i in range(600):
        if i % 10 == 0:
            setup = overloaded_partition(1, b=float(rng.uniform(0.3, 0.9)))
            mk, x, b = setup.mk, setup.marginals, setup.b
        else:
            mk, x, b = _random_instance(rng)
        instances += 1
        S, _ = kfold_protect(mk, x, b, est)
        if not S < frozenset(range(mk.size)) or not mk.is_group_union(S):
            bad += 1
            continue
        nonempty += bool(S)
        key = json.dumps(mk.base.to_dict(), sort_keys=True) + f"|{mk.k}"
        if key not in tables:
            tables[key] = brute_extended_ranks(mk.base, mk.k)
        means = _enumerated_occupancy(mk, x, S, tables[key])
        loops = mk.base.loops()
        for e, v in means.items():
            if e in mk.project(S) or e in loops:
                continue
            survivors += 1
            bad += v > b * mk.k + 1e-9
    ok = bad == 0 and instances >= 500
    verdict(report_line, 4, ok, f"{instances} instances ({nonempty} with non-empty S), {survivors} survivors "
                                f"checked by enumeration, {bad} violations", t0)
    assert ok


def test_c05_single_item_baseline(report_line):
    t0 = time.time()
    setup = uniform_suite(1)
    chain = build_chain(setup.mk, setup.chain_marginals(), setup.b, ExpectationEstimator(mode="exact"))
    rep = estimate_selectability(setup.mk, setup.marginals, chain, setup.b, 100_000, seed=5,
                                 downsample=setup.downsample, shrink=setup.shrink)
    lo, hi = rep.min_ci
    ok = rep.min_rate >= 0.25 - 0.01
    verdict(report_line, 5, ok, f"min selectability {rep.min_rate:.4f} (CI {lo:.4f}..{hi:.4f}) >= 0.24 "
                                f"at N=100000", t0)
    assert ok


@pytest.mark.parametrize("k", [16, 64])
def test_c06_kfold_selectability(k, report_line):
    t0 = time.time()
    setup = uniform_suite(k)
    target = 1 - 3 * math.sqrt(math.log(k) / k)
    assert math.isclose(setup.b, 1 - math.sqrt(math.log(k) / k))
    chain = build_chain(setup.mk, setup.chain_marginals(), setup.b, ExpectationEstimator())
    mins, cis = {}, {}
    for policy in ("fixed", "reverse", "uniform-random"):
        rep = estimate_selectability(setup.mk, setup.marginals, chain, setup.b, 100_000, seed=11, policy=policy)
        mins[policy] = rep.min_rate
        cis[policy] = rep.min_ci
    above = all(v >= target for v in mins.values())
    overlap = max(lo for lo, _ in cis.values()) <= min(hi for _, hi in cis.values())
    ok = above and overlap
    shown = ", ".join(f"{p} {v:.4f}" for p, v in mins.items())
    verdict(report_line, 6, ok, f"k={k}: min rates {shown} vs target {target:.4f}; CIs overlap: {overlap}", t0)
    assert ok


def test_c07_concentration_grid(report_line):
    t0 = time.time()
    grid = default_grid(100)
    s_k, t_k = math.sqrt(math.log(100) / 100), math.sqrt(100 * math.log(100))
    assert (s_k, t_k) in grid and len(grid) >= 12
    cases = [
        (CappedSum(1000, 520), np.full(1000, 0.5)),
        occupancy_instance(k=100, base_elements=4, capacity=2, p=0.35),
        (CoordinateMax(200), np.full(200, 0.01)),
    ]
    failures, worst = 0, -math.inf
    for i, (f, p) in enumerate(cases):
        for est in sweep(f, p, grid, 1_000_000, seed=21 + i):
            failures += not est.within_bound
            worst = max(worst, (est.empirical - est.bound) / max(est.halfwidth, 1e-12))
    ok = failures == 0
    verdict(report_line, 7, ok, f"3 functions x {len(grid)} grid points at N=1000000, {failures} failures "
                                f"(largest excess {worst:.2f} half-widths)", t0)
    assert ok


def test_c08_counterexample(report_line):
    t0 = time.time()
    rep = counterexample_starstar(1000, 10, 100_000, seed=8)
    ok = rep.mean_ok and rep.tail_ok and rep.oracle_gap <= 0.02
    verdict(report_line, 8, ok, f"mean {rep.mean_hat:.3f} +- {rep.mean_hw:.3f} (<= 5), tail {rep.tail_hat:.4f} "
                                f"(>= 0.3), exact {rep.tail_exact:.4f}, gap {rep.oracle_gap:.4f}", t0)
    assert ok


def test_c09_hardness_instance(report_line):
    t0 = time.time()
    names = ["petersen", "heawood", "pg2-4", "pg2-9"]
    named = sorted(((n, graphs.by_name(n)) for n in names), key=lambda item: len(item[1][1]))
    a = b = c = d = e = True
    gaps = []
    for eps in (0.1, 0.25):
        rows = girth_lowerbound_report(named, eps, 100_000, seed=9)
        for r in rows:
            a &= r["girth_split"] == 2 * r["girth_source"]
            gap = abs(r["opt_mean"] - r["opt_lower_bound"]) / r["opt_lower_bound"]
            gaps.append(gap)
            b &= gap <= 0.01
            c &= r["within_ceiling"]
            d &= r["pairs_ok"]
        e &= nonincreasing([r["best_ratio"] for r in rows], [r["best_ratio_hw"] for r in rows])
    ok = a and b and c and d and e
    flag = {True: "ok", False: "FAIL"}
    verdict(report_line, 9, ok, f"(a) girth doubling {flag[a]}; (b) OPT within 1% of m(2-eps) {flag[b]} "
                                f"(gaps {min(gaps):.3f}..{max(gaps):.3f}); (c) ceiling {flag[c]}; "
                                f"(d) double pairs {flag[d]}; (e) trend {flag[e]}", t0)
    assert ok


def _cli_run(tmp, command, cfg, threads, extra=()):
    out = tmp / f"{command}-{threads}"
    args = [command, "--seed", "12345", "--threads", str(threads), "--out", str(out), *extra]
    if cfg is not None:
        path = tmp / f"{command}.yaml"
        path.write_text(yaml.safe_dump(cfg))
        args += ["--config", str(path)]
    try:
        main(args)
    except SystemExit as exc:
        assert exc.code == 0, f"{command} exited with {exc.code}"
    manifest = json.loads((out / "manifest.json").read_text())
    return manifest["config_hash"], {f["path"]: f["sha256"] for f in manifest["files"]}


def test_c10_reproducibility(tmp_path, report_line):
    t0 = time.time()
    gen = tmp_path / "gen"
    try:
        main(["gen-instance", "--family", "uniform-suite", "--param", "k=16", "--out", str(gen)])
    except SystemExit as exc:
        assert exc.code == 0
    runs = [
        ("ocrs-select", json.loads((gen / "ocrs_select.json").read_text()) | {"order_policy": "uniform-random"},
         ["--trials", "40000"]),
        ("prophet-ratio", {"instance_file": str(gen / "prophet_instance.json"), "reduction": {"samples": 1000}},
         ["--trials", "20000"]),
        ("girth-bound", {"graphs": ["petersen", "heawood"], "eps": [0.25], "reduction_samples": 500,
                         "estimator_samples": 500}, ["--trials", "20000"]),
        ("concentration-sweep", {"counterexample": {"n": 1000, "k": 10, "samples": 5000}}, ["--trials", "20000"]),
        ("verify-oracles", {"corpus": ["graphic-k4", "partition-21"], "max_k": 2}, []),
        ("gen-instance", {"family": "hard-girth", "params": {"graph": "heawood", "eps": 0.1}}, []),
    ]
    mismatched = []
    for command, cfg, extra in runs:
        one = _cli_run(tmp_path, command, cfg, 1, extra)
        eight = _cli_run(tmp_path, command, cfg, 8, extra)
        if one != eight:
            mismatched.append(command)
    ok = not mismatched
    verdict(report_line, 10, ok, f"{len(runs)} CLI runs at 1 vs 8 threads, manifest digests "
                                 f"{'identical' if ok else 'differ for ' + ', '.join(mismatched)}", t0)
    assert ok
