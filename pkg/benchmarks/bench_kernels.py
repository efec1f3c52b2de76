"""Compiled versus NumPy Rayleigh-Sommerfeld kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Sizes mirror
the fast-mode focal run (radial) and one field-offset spot (planar).
"""
import argparse
import math
import timeit

import numpy as np

from pflion.diffraction import _kernel_py

try:
    from pflion.diffraction import _kernel
except ImportError:
    _kernel = None

LAM = 369.5e-9
K = 2 * math.pi / LAM


def cases(rng):
    n, m = 4 * 490, 200
    r = np.sort(rng.uniform(0, 250e-6, n))
    w = rng.uniform(0, 1e-12, n)
    u = np.exp(1j * rng.uniform(0, 2 * math.pi, n))
    rho = np.linspace(0, 1e-6, m)
    yield "rs_radial", f"{n} nodes x {m} points", "rs_radial", (r, w, u, rho, 3e-4, K)
    n, m = 20000, 33 * 33
    x, y = rng.uniform(-250e-6, 250e-6, (2, n))
    w = rng.uniform(0, 1e-12, n)
    u = np.exp(1j * rng.uniform(0, 2 * math.pi, n))
    X, Y = (a.ravel() for a in np.meshgrid(np.linspace(-1e-6, 1e-6, 33), np.linspace(-1e-6, 1e-6, 33)))
    yield "rs_planar", f"{n} nodes x {m} points", "rs_planar", (x, y, w, u, X, Y, 3e-4, K)


def best_time(f, args, repeat):
    return min(timeit.repeat(lambda: f(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<10} {'size':<26} {'numpy [s]':>10} {'cython [s]':>11} {'speedup':>8}")
    for name, size, attr, a in cases(rng):
        t_py = best_time(getattr(_kernel_py, attr), a, args.repeat)
        if _kernel is None:
            print(f"{name:<10} {size:<26} {t_py:10.4f} {'n/a':>11} {'n/a':>8}")
            continue
        t_c = best_time(getattr(_kernel, attr), a, args.repeat)
        diff = np.max(np.abs(getattr(_kernel, attr)(*a) - getattr(_kernel_py, attr)(*a)))
        scale = np.max(np.abs(getattr(_kernel_py, attr)(*a)))
        print(f"{name:<10} {size:<26} {t_py:10.4f} {t_c:11.4f} {t_py / t_c:7.1f}x"
              f"   max rel diff {diff / scale:.1e}")


if __name__ == "__main__":
    main()
