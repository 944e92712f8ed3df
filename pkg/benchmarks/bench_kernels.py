#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Workloads mirror where the package actually spends time: dense coverage
lattices from deployment verification, per-step lateration solves, and
sequential Kalman chains. Run from the repo root:

    python benchmarks/bench_kernels.py

Set RSSILOC_NO_NUMBA=1 to confirm the numpy path alone still runs
everything (no speedup table in that case).
"""

import time

import numpy as np

from rssiloc import kernels


def timeit(fn, *args, reps=5, inner=1):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_coverage(rows):
    # acceptance-scale worst case: 100 m roi at 0.25 m pitch, dense grid
    rng = np.random.default_rng(0)
    xs = np.arange(0.0, 100.0 + 0.125, 0.25)
    gx, gy = np.meshgrid(xs, xs)
    px, py = gx.ravel(), gy.ravel()
    bx = rng.uniform(0, 100, 289)
    by = rng.uniform(0, 100, 289)
    args = (px, py, bx, by, 12.0, 3)
    t_np = timeit(kernels.coverage_counts_np, *args)
    row = ["coverage_counts", f"{px.size:,} pts x {bx.size} beacons", t_np]
    if kernels.BACKEND == "numba":
        kernels.coverage_counts_jit(*args)  # compile before timing
        t_jit = timeit(kernels.coverage_counts_jit, *args)
        assert np.array_equal(kernels.coverage_counts_jit(*args),
                              kernels.coverage_counts_np(*args))
        row += [t_jit, t_np / t_jit]
    rows.append(row)


def bench_lateration(rows):
    rng = np.random.default_rng(1)
    cases = []
    for _ in range(10_000):
        ax = rng.uniform(0, 100, 3)
        ay = rng.uniform(0, 100, 3)
        d = rng.uniform(1, 120, 3)
        cases.append((ax, ay, d))

    def run(solve):
        for ax, ay, d in cases:
            solve(ax, ay, d)

    t_np = timeit(run, kernels.lateration_solve_np, reps=3)
    row = ["lateration_solve", "10,000 three-anchor solves", t_np]
    if kernels.BACKEND == "numba":
        kernels.lateration_solve_jit(*cases[0])
        t_jit = timeit(run, kernels.lateration_solve_jit, reps=3)
        row += [t_jit, t_np / t_jit]
    rows.append(row)


def bench_ekf(rows):
    rng = np.random.default_rng(2)
    ax = np.array([0.0, 30.0, 15.0])
    ay = np.array([0.0, 0.0, 30.0])
    st_mat = np.eye(2)
    ctrl = np.zeros(2)
    q = 0.01 * np.eye(2)
    r = np.eye(3)
    zs = rng.uniform(5, 40, (10_000, 3))

    def run(step):
        pos = np.array([12.0, 9.0])
        cov = np.zeros((2, 2))
        for z in zs:
            ok, pos, cov = step(pos, cov, ax, ay, z, st_mat, ctrl, q, r)
        return pos

    t_np = timeit(run, kernels.ekf_step_np, reps=3)
    row = ["ekf_step", "10,000-step filter chain", t_np]
    if kernels.BACKEND == "numba":
        run(kernels.ekf_step_jit)
        t_jit = timeit(run, kernels.ekf_step_jit, reps=3)
        row += [t_jit, t_np / t_jit]
    rows.append(row)


def main():
    print(f"backend: {kernels.BACKEND}")
    kernels.warmup()
    rows = []
    bench_coverage(rows)
    bench_lateration(rows)
    bench_ekf(rows)

    if kernels.BACKEND == "numba":
        print(f"{'kernel':<18} {'workload':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}")
        for name, load, t_np, t_jit, speedup in rows:
            print(f"{name:<18} {load:<28} {t_np * 1e3:>8.2f}ms {t_jit * 1e3:>8.2f}ms "
                  f"{speedup:>7.1f}x")
    else:
        print(f"{'kernel':<18} {'workload':<28} {'numpy':>10}")
        for name, load, t_np in rows:
            print(f"{name:<18} {load:<28} {t_np * 1e3:>8.2f}ms")


if __name__ == "__main__":
    main()
