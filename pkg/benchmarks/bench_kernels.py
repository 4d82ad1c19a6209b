"""Compare the compiled kernels against the NumPy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
both backends and the outputs are checked for agreement before timing.
"""

import argparse
import sys
import timeit

import numpy as np

from sskdyn._backend import compiled, fallback


def cases(size):
    rs = np.random.default_rng(0)
    n_ctr = 200_000 * size
    ctr = np.zeros((n_ctr, 4), dtype=np.uint32)
    ctr[:, 0] = np.arange(n_ctr, dtype=np.uint32)
    ctr[:, 2] = 3
    c0 = np.arange(n_ctr, dtype=np.uint32)
    c1 = np.zeros(n_ctr, dtype=np.uint32)
    m = 4000 * size
    g = np.exp(-np.linspace(0.0, 4.0, m))
    n = 1000 * size
    sigma = rs.uniform(-2, 2, n)
    noise = rs.standard_normal(n)
    y0 = rs.standard_normal(n)
    return [
        ("philox4x32", lambda k: k.philox4x32(7, 11, ctr)),
        ("philox_normals", lambda k: k.philox_normals(7, 11, c0, c1, 3, 0)),
        ("volterra_march", lambda k: k.volterra_march(g, 1.0, 0.5, 1e-3, 700.0)[0]),
        ("convolve_trapezoid", lambda k: k.convolve_trapezoid(g, g, 1e-3)),
        ("euler_diag_step", lambda k: (lambda y: (k.euler_diag_step(y, sigma, noise, 1.0, 1.0, 1e-3, 1.0), y)[1])(y0.copy())),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=1, help="problem size multiplier")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels unavailable; build the extension first", file=sys.stderr)
        return 1
    print(f"{'kernel':<20} {'numpy [s]':>11} {'cython [s]':>11} {'speedup':>8}  agree")
    ok = True
    for name, call in cases(args.size):
        a = np.asarray(call(fallback), dtype=float)
        b = np.asarray(call(compiled), dtype=float)
        agree = np.allclose(a, b, rtol=1e-12, atol=1e-14)
        ok &= agree
        t_py = min(timeit.repeat(lambda: call(fallback), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat))
        print(f"{name:<20} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:8.1f}  {agree}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
