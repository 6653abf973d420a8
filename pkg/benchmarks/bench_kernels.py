"""Time the compiled kernels against the numpy fallback.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``. Prints one row
per kernel and size with the best-of-N time for each backend, their ratio
and the maximum absolute difference between the two results.
"""
import argparse
import timeit

import numpy as np

from loewnerkit import _pykernels

try:
    from loewnerkit import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    for n in (50, 200, 800):
        mu = rng.standard_normal(n) + 1j * rng.uniform(0.1, 100, n)
        lam = rng.standard_normal(n) - 1j * rng.uniform(0.1, 100, n)
        v = rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))
        w = rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))
        yield "loewner_blocks", n, "loewner_blocks", (mu, v, lam, w)
    for n in (50, 200, 800):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        yield "cauchy", n, "cauchy", (x, x + 5.0)
    for k in (10, 50):
        nodes = 1j * rng.uniform(0.5, 10, k)
        vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        wts = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        s = 1j * np.linspace(0.1, 12, 5000) + 0.01
        yield "bary_eval_siso", k, "bary_eval_siso", (nodes, vals, wts, s, True, 1e-14)


def _diff(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the numpy fallback is available")
    print(f"{'kernel':<16}{'size':>6}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}{'max diff':>11}")
    for label, size, name, call_args in _cases(np.random.default_rng(args.seed)):
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:<16}{size:>6}{1e3 * t_py:>13.3f}{'-':>13}{'-':>9}{'-':>11}")
            continue
        cy = getattr(_ckernels, name)
        t_cy = min(timeit.repeat(lambda: cy(*call_args), number=1, repeat=args.repeat))
        diff = _diff(py(*call_args), cy(*call_args))
        print(f"{label:<16}{size:>6}{1e3 * t_py:>13.3f}{1e3 * t_cy:>13.3f}"
              f"{t_py / t_cy:>9.2f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
