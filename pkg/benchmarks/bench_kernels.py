"""Time the compiled trial kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--trials 2000] [--repeat 3]

Each kernel runs on the same inputs under both backends; the outputs are
compared before any timing is reported.
"""
import argparse
import time

import numpy as np

from ocrs_lab import graphs, kernels


def partition_case(trials, rng):
    n, blocks, levels = 256, 16, 3
    block = rng.integers(0, blocks, n)
    level = rng.integers(0, levels, n)
    cap = rng.integers(1, 8, blocks)
    base = np.zeros((levels, blocks), dtype=np.int64)
    order = np.stack([rng.permutation(n) for _ in range(trials)])
    cand = (rng.random((trials, n)) < 0.5).astype(np.uint8)
    return "level_greedy_partition", kernels.level_greedy_partition, (block, level, base, cap, order, cand)


def graphic_case(trials, rng):
    nv, edges = graphs.by_name("pg2-4")
    eu = np.array([u for u, _ in edges])
    ev = np.array([v for _, v in edges])
    n = len(edges)
    level = rng.integers(0, 2, n)
    init = np.tile(np.arange(nv), (2, 1))
    order = np.stack([rng.permutation(n) for _ in range(trials)])
    cand = (rng.random((trials, n)) < 0.6).astype(np.uint8)
    return "level_greedy_graphic", kernels.level_greedy_graphic, (eu, ev, level, init, order, cand)


def span_case(trials, rng):
    nv, edges = graphs.by_name("heawood")
    eu = np.array([u for u, _ in edges])
    ev = np.array([v for _, v in edges])
    present = (rng.random((trials, len(edges))) < 0.4).astype(np.uint8)
    return "graphic_span_counts", kernels.graphic_span_counts, (eu, ev, np.arange(nv), present)


def best_time(fn, args, backend, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if "compiled" not in kernels.available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}")
    for make in (partition_case, graphic_case, span_case):
        name, fn, inputs = make(args.trials, rng)
        t_py, out_py = best_time(fn, inputs, "python", args.repeat)
        t_c, out_c = best_time(fn, inputs, "compiled", args.repeat)
        if not np.array_equal(out_py, out_c):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<24}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
