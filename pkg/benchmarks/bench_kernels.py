"""Benchmark the jit kernels against their pure-numpy fallbacks.

Run from the repository root:

    python benchmarks/bench_kernels.py

Both implementation sets are imported directly, so the timing does not
depend on the FERMIPULSE_NO_NUMBA flag (a missing numba install skips the
jit column).
"""

import time

import numpy as np

from fermipulse import _kernels


def timeit(fn, *args, repeat=5, warmup=True):
    if warmup:
        fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = np.random.default_rng(1)
    w = rng.uniform(0.0, 1.0, 20_000)
    s = 48
    p2 = rng.uniform(0.0, 1.0, (s + 1, s + 1))
    mx = rng.uniform(0.0, 1.0, (s + 1, s + 1))
    mz = rng.uniform(0.0, 1.0, (s + 1, s + 1))
    return [
        ("laguerre_scaled_table(n=20000, x=300)", "laguerre_scaled_table", (20_000, 2.0, 300.0)),
        ("laguerre_weighted_sum(n=20000, x=300)", "laguerre_weighted_sum", (w, 2.0, 300.0)),
        ("fc_matrix(size=800, x=150)", "fc_matrix", (800, 150.0)),
        ("fc_matrix(size=2500, x=400)", "fc_matrix", (2500, 400.0)),
        ("quad_sum(S=48)", "quad_sum", (p2, mx, mz)),
    ]


def main():
    rows = []
    for label, name, args in workloads():
        t_np = timeit(_kernels.NUMPY_IMPLS[name], *args)
        if _kernels.USING_NUMBA:
            t_jit = timeit(_kernels.JIT_IMPLS[name], *args)
            rows.append((label, t_np, t_jit, t_np / t_jit))
        else:
            rows.append((label, t_np, None, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for label, t_np, t_jit, speedup in rows:
        if t_jit is None:
            print(f"{label:<{width}}  {t_np * 1e3:>8.2f}ms  {'n/a':>10}  {'n/a':>8}")
        else:
            print(
                f"{label:<{width}}  {t_np * 1e3:>8.2f}ms  {t_jit * 1e3:>8.2f}ms  {speedup:>7.1f}x"
            )


if __name__ == "__main__":
    main()
