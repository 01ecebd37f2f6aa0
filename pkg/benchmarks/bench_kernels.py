"""Compare the numba and numpy kernel backends.

Runs each spectral-density kernel on a range of grid sizes and prints the
per-call time of both implementations plus the speedup. The numba versions
are warmed up first so compilation time is excluded.

Usage: python benchmarks/bench_kernels.py [--sizes 100 10000 1000000]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from optospring import _kernels

if _kernels.active_backend() != "numba":
    raise SystemExit("numba backend not active; unset OPTOSPRING_BACKEND "
                     "(or install numba) to run the comparison")

CASES = {
    "position_meter": (
        lambda chi_i, chi_s: (chi_i, 1.3),
        _kernels._position_meter_nb, _kernels._position_meter_np),
    "lossy_virtual": (
        lambda chi_i, chi_s: (chi_i, 0.8, 2.5, 0.3),
        _kernels._lossy_virtual_nb, _kernels._lossy_virtual_np),
    "lossy_real": (
        lambda chi_i, chi_s: (chi_i, 0.8, 2.5, 0.3),
        _kernels._lossy_real_nb, _kernels._lossy_real_np),
    "lossy_bound": (
        lambda chi_i, chi_s: (chi_i, 2.5, 0.3),
        _kernels._lossy_bound_nb, _kernels._lossy_bound_np),
    "hybrid_full": (
        lambda chi_i, chi_s: (chi_i, chi_s, 1.3, 4.0, 4.0, 0.2, 0.1, 0.9),
        _kernels._hybrid_full_nb, _kernels._hybrid_full_np),
    "hybrid_approx": (
        lambda chi_i, chi_s: (chi_i, chi_s, 1.3, 0.2, 0.1, 0.9, False),
        _kernels._hybrid_approx_nb, _kernels._hybrid_approx_np),
}


def bench(fn, args, budget_s=0.2):
    fn(*args)  # warm up / jit compile
    n, t = 1, 0.0
    while t < budget_s / 10:
        n *= 4
        t = timeit.timeit(lambda: fn(*args), number=n)
    return t / n


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[100, 10_000, 1_000_000])
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':15s} {'n':>9s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}")
    for size in args.sizes:
        chi_i = np.ascontiguousarray(rng.uniform(-100, 100, size))
        chi_s = np.ascontiguousarray(rng.uniform(-100, 100, size))
        for name, (make_args, fn_nb, fn_np) in CASES.items():
            call_args = make_args(chi_i, chi_s)
            np.testing.assert_allclose(fn_nb(*call_args), fn_np(*call_args),
                                       rtol=1e-12)
            t_nb = bench(fn_nb, call_args)
            t_np = bench(fn_np, call_args)
            print(f"{name:15s} {size:9d} {t_nb * 1e6:10.2f}us "
                  f"{t_np * 1e6:10.2f}us {t_np / t_nb:7.2f}x")


if __name__ == "__main__":
    main()
