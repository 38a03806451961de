#!/usr/bin/env python3
"""Benchmark the compiled inner loops against the pure-numpy fallback.

Times ``wnpreg._core`` (if built) and ``wnpreg._core_py`` on the two hot
paths -- the per-point local-fit t statistics and the residual pair sums --
and reports the speedup plus the largest numerical disagreement.
"""

import argparse
import time

import numpy as np

from wnpreg import _core_py

try:
    from wnpreg import _core
except ImportError:
    _core = None


def _best_of(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=500, help="sample size")
    ap.add_argument("--points", type=int, default=17,
                    help="number of evaluation points")
    ap.add_argument("--reps", type=int, default=200,
                    help="timing repetitions (best is reported)")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    x = np.cumsum(rng.standard_normal(args.n + 1))
    xlag, y = x[:-1], x[1:] + rng.standard_normal(args.n)
    r2 = rng.standard_normal(args.n) ** 2
    points = np.quantile(x, np.linspace(0.1, 0.9, args.points))
    h = float(args.n) ** -0.1
    q11 = 0.5 / np.sqrt(np.pi)
    uhat = rng.standard_normal(args.n)

    cases = [
        ("ftilde_tstats_gauss",
         lambda mod: mod.ftilde_tstats_gauss(
             xlag, y, xlag, r2, points, points, points, h, q11)),
        ("wp_sums_gauss",
         lambda mod: mod.wp_sums_gauss(x[:-1], uhat, h)),
    ]
    print(f"n={args.n} points={args.points} reps={args.reps}")
    for name, call in cases:
        t_py = _best_of(lambda: call(_core_py), args.reps)
        line = f"{name:<22} python {t_py * 1e3:8.3f} ms"
        if _core is not None:
            t_c = _best_of(lambda: call(_core), args.reps)
            dev = np.max(np.abs(np.asarray(call(_core), dtype=float)
                                - np.asarray(call(_core_py), dtype=float)))
            line += (f"   compiled {t_c * 1e3:8.3f} ms"
                     f"   speedup x{t_py / t_c:5.1f}   max|diff| {dev:.2e}")
        else:
            line += "   (compiled backend not built)"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
