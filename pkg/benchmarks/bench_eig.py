#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the pure-Python fallback.

Both kernels run the identical sweep order, so this isolates the language
overhead of the hot rotation loop.  Run after an editable install:

    python benchmarks/bench_eig.py [--sizes 8,16,32,64,128] [--repeats 5]
"""

import argparse
import time

import numpy as np

from unispan import _jacobi_py

try:
    from unispan import _jacobi
except ImportError:
    _jacobi = None


def random_hermitian(rng, n):
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return (g + g.conj().T) / 2


def time_kernel(kernel, h, repeats):
    best = np.inf
    for _ in range(repeats):
        hw = np.ascontiguousarray(h.copy())
        v = np.eye(h.shape[0], dtype=np.complex128)
        start = time.perf_counter()
        sweeps = kernel.jacobi_sweeps(hw, v, 0.5e-12, 60)
        best = min(best, time.perf_counter() - start)
    return best, sweeps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,128")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"{'n':>5} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>9} {'sweeps':>7}")
    for n in sizes:
        h = random_hermitian(rng, n)
        t_pure, sweeps = time_kernel(_jacobi_py, h, args.repeats)
        if _jacobi is None:
            print(f"{n:>5} {t_pure * 1e3:>12.2f} {'n/a':>14} {'n/a':>9} {sweeps:>7}")
            continue
        t_comp, sweeps_c = time_kernel(_jacobi, h, args.repeats)
        assert sweeps == sweeps_c, "kernels diverged in sweep count"
        print(
            f"{n:>5} {t_pure * 1e3:>12.2f} {t_comp * 1e3:>14.2f} "
            f"{t_pure / t_comp:>8.1f}x {sweeps:>7}"
        )
    if _jacobi is None:
        print("\ncompiled kernel not built; install with a C compiler to compare")


if __name__ == "__main__":
    main()
