"""Compare the compiled and pure-Python kernel backends.

Only the Euler loop has a compiled variant; the quadrature is vectorised numpy
on both backends (a scalar compiled loop measured about 3x slower).

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from fracchenlee import _pykernels
from fracchenlee.frackernel import gamma

try:
    from fracchenlee import _ckernels
except ImportError:
    _ckernels = None


def euler_case(impl, n_steps, q):
    out = np.empty((n_steps + 1, 3))
    x0 = np.array([0.01, 1.01, 0.01])
    args = (x0, -2.0, 0.0, 1.0, -0.8, 1.0, True, q, 1.0 / gamma(q), 1e-3, n_steps, 0.01,
            n_steps + 2.0, 0.0, True, out)
    return lambda: impl.euler_loop(*args)


def best_of(fn, repeat):
    fn()  # warm-up
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=100_000, help="Euler steps per run")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled backend not built; only the Python timings are shown")
    cases = [
        (f"euler_loop N={args.steps}", lambda impl: euler_case(impl, args.steps, 0.9)),
    ]
    print(f"{'kernel':<30}{'python [s]':>14}{'cython [s]':>14}{'speed-up':>10}")
    for name, make in cases:
        t_py = best_of(make(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<30}{t_py:>14.4g}{'-':>14}{'-':>10}")
            continue
        t_c = best_of(make(_ckernels), args.repeat)
        print(f"{name:<30}{t_py:>14.4g}{t_c:>14.4g}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
