"""Time the compiled table kernels against the numpy fallback.

Usage: ``python benchmarks/bench_kernels.py [--n N] [--repeat R]``.
Both backends run on the same table (the quartic-perturbed Gaussian) and the
script checks that their outputs agree before reporting timings.
"""
import argparse
import timeit

import numpy as np
from scipy import special

from wasscert import _kernels_py
from wasscert.measure1d import XTOL, PotentialSpec, normalize

try:
    from wasscert import _kernels
except ImportError:
    _kernels = None


def calls(mod, t, x, p):
    return {
        "pdf": lambda: mod.table_pdf(t.edges, t.coef, x),
        "cdf": lambda: mod.table_cdf(t.edges, t.icoef, t.cum, x),
        "sf": lambda: mod.table_sf(t.edges, t.icoef, t.mass, t.tail, x),
        "ppf": lambda: mod.table_ppf(t.edges, t.coef, t.icoef, t.cum, p, XTOL),
        "isf": lambda: mod.table_isf(t.edges, t.coef, t.icoef, t.mass, t.tail, p, XTOL),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000, help="points per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    t = normalize(PotentialSpec.polynomial([0, 0, 0.5, 0, 0.25])).table
    rng = np.random.default_rng(0)
    x = np.ascontiguousarray(rng.uniform(-3, 3, args.n))
    p = np.ascontiguousarray(special.ndtr(rng.uniform(-8, 8, args.n)))

    py = calls(_kernels_py, t, x, p)
    if _kernels is None:
        print("compiled extension not built; timing the numpy fallback only")
    cy = calls(_kernels, t, x, p) if _kernels is not None else {}

    print(f"{'kernel':<6} {'python ms':>10} {'cython ms':>10} {'speedup':>8} {'max diff':>10}")
    for name, f in py.items():
        tp = min(timeit.repeat(f, number=1, repeat=args.repeat)) * 1e3
        if name in cy:
            tc = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
            diff = float(np.max(np.abs(np.asarray(f()) - np.asarray(cy[name]()))))
            print(f"{name:<6} {tp:10.2f} {tc:10.2f} {tp / tc:8.1f} {diff:10.1e}")
        else:
            print(f"{name:<6} {tp:10.2f} {'-':>10} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
