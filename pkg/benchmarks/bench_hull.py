"""Time the envelope solve with the compiled and the numpy hull kernels.

    python3 benchmarks/bench_hull.py --sizes 65,129,257 --repeat 3
"""

import argparse
import time
from unittest import mock

import numpy as np

from mabuchi import kernels
from mabuchi.envelope import envelope_grid
from mabuchi.expr import parse_expression
from mabuchi.grid import SpaceDomain, SpaceTimeGrid


def run(backend, n, repeat):
    phi0, phi1 = parse_expression("2*(x^2-1)"), parse_expression("x^2-1")
    dom = SpaceDomain.interval(-1.0, 1.0)
    grid = SpaceTimeGrid.over(dom, n, n)
    best, u = np.inf, None
    with mock.patch.object(kernels, "pivot", backend.pivot), \
         mock.patch.object(kernels, "max_plane", backend.max_plane):
        for _ in range(repeat):
            t0 = time.perf_counter()
            u, _ = envelope_grid(phi0, phi1, dom, grid)
            best = min(best, time.perf_counter() - t0)
    return best, u.values


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="65,129,257")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    if kernels.compiled_backend is None:
        print("compiled kernel not built; timing the numpy fallback only")
    print(f"{'n':>5} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max |diff|':>11}")
    for n in sizes:
        tp, up = run(kernels.python_backend, n, args.repeat)
        if kernels.compiled_backend is None:
            print(f"{n:>5} {tp:>11.4f} {'-':>11} {'-':>8} {'-':>11}")
            continue
        tc, uc = run(kernels.compiled_backend, n, args.repeat)
        print(f"{n:>5} {tp:>11.4f} {tc:>11.4f} {tp / tc:>8.1f} {np.max(np.abs(up - uc)):>11.2e}")


if __name__ == "__main__":
    main()
