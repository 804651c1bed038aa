"""Compare the compiled product-integration kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 256,1024,4096] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and grid size, the
speed-up, and the largest relative difference between the two results.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from psiham import _kernels_py

try:
    from psiham import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

KERNELS = ("linear_product_integral", "constant_product_integral",
           "linear_product_history", "constant_product_history")


def _best(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="256,1024,4096")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--gamma", type=float, default=0.5)
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernels not available; build with: pip install -e . --no-build-isolation")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'nodes':>7}{'python s':>12}{'compiled s':>12}{'speed-up':>10}{'max rel diff':>14}")
    for n in (int(v) for v in args.sizes.split(",")):
        values = np.cos(np.linspace(0.0, 3.0, n)) + 0.1 * rng.standard_normal(n)
        h = 1.0 / (n - 1)
        for name in KERNELS:
            slow, fast = getattr(_kernels_py, name), getattr(compiled, name)
            t_py = _best(lambda: slow(values, args.gamma, h), args.repeat)
            t_c = _best(lambda: fast(values, args.gamma, h), args.repeat)
            a = np.atleast_1d(slow(values, args.gamma, h))
            b = np.atleast_1d(fast(values, args.gamma, h))
            diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
            print(f"{name:<28}{n:>7}{t_py:>12.2e}{t_c:>12.2e}{t_py / t_c:>10.1f}{diff:>14.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
