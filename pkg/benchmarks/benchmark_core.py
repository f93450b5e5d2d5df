"""Timing comparison of the compiled and numpy pairwise engines.

Run directly:  python3 benchmarks/benchmark_core.py
"""

import time

import numpy as np

from wadbounds import _core
from wadbounds._core import _fallback
from wadbounds.kernels import build_kernel


def _time(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def run():
    if _core.BACKEND != "compiled":
        print("compiled backend unavailable; timing the fallback only")
    rng = np.random.default_rng(0)
    print(f"{'operation':<22}{'n':>6}{'ell':>5}{'compiled':>12}{'fallback':>12}{'speedup':>9}")
    for n in (250, 500, 1000, 2000):
        for ell in (1, 2, 3):
            z = np.ascontiguousarray(rng.standard_normal((n, ell)))
            coeffs = np.ascontiguousarray(build_kernel("higher_order_gaussian", ell).coefficients)
            t_fb = _time(_fallback.score_table, z, 0.5, coeffs)
            if _core.BACKEND == "compiled":
                t_c = _time(_core.score_table, z, 0.5, coeffs)
                print(f"{'score_table':<22}{n:>6}{ell:>5}{t_c:>11.4f}s{t_fb:>11.4f}s{t_fb / t_c:>8.1f}x")
            else:
                print(f"{'score_table':<22}{n:>6}{ell:>5}{'-':>12}{t_fb:>11.4f}s{'-':>9}")
    for n in (250, 500, 1000):
        z = np.ascontiguousarray(rng.standard_normal((n, 2)))
        coeffs = np.ascontiguousarray(build_kernel("gaussian", 2).coefficients)
        t_fb = _time(_fallback.pair_gradient_field, z, 0.5, coeffs)
        if _core.BACKEND == "compiled":
            t_c = _time(_core.pair_gradient_field, z, 0.5, coeffs)
            print(f"{'pair_gradient_field':<22}{n:>6}{2:>5}{t_c:>11.4f}s{t_fb:>11.4f}s{t_fb / t_c:>8.1f}x")
        else:
            print(f"{'pair_gradient_field':<22}{n:>6}{2:>5}{'-':>12}{t_fb:>11.4f}s{'-':>9}")


if __name__ == "__main__":
    run()
