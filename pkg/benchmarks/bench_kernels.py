"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the three hot paths (load evaluation, a fixed-step Euler rollout and
the trim-angle root search) on both backends, checks that they agree, and
prints the speedup.
"""

import argparse
import math
import timeit

import numpy as np

from perchkit import kernels
from perchkit.aero import packed
from perchkit.params import AeroCoeffs, PlatformParams


def cases(mod, p):
    out = np.empty(kernels.N_LOADS)
    n = 2000
    f = np.full(n, 5.2)
    de = np.linspace(-0.3, -0.1, n)
    y0 = np.array([0.0, 0.0, 0.0, 6.0, -0.2, 0.0])
    traj = np.empty((n + 1, 6))
    return {
        "loads x1000": lambda: [mod.loads(p, 5.0, 0.2, 0.25, 0.8, -0.2, 0.3, 0, 0, out) for _ in range(1000)],
        "euler 2000 steps": lambda: mod.euler(p, y0, f, de, 5e-4, 0.0, 1.0, 0, 0, 0.1, traj),
        "trim_alpha x100": lambda: [mod.trim_alpha(p, 6.0, -0.2, 0.0, 0.8, -0.2, math.radians(36), 1e-10)
                                   for _ in range(100)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    p = packed(PlatformParams(), AeroCoeffs())
    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` first")
        return 1

    # agreement on a rollout before timing anything
    a, b = np.empty((201, 6)), np.empty((201, 6))
    y0 = np.array([0.0, 0.0, 0.0, 6.0, -0.2, 0.0])
    py.euler(p, y0, np.full(200, 5.2), np.full(200, -0.2), 5e-4, 0.0, 1.0, 0, 0, 0.1, a)
    cy.euler(p, y0, np.full(200, 5.2), np.full(200, -0.2), 5e-4, 0.0, 1.0, 0, 0, 0.1, b)
    print(f"max |python - cython| over a 200-step rollout: {np.max(np.abs(a - b)):.2e}")

    print(f"{'kernel':<20}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    cpy, ccy = cases(py, p), cases(cy, p)
    for name in cpy:
        t_py = min(timeit.repeat(cpy[name], number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(ccy[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{t_py:>14.3f}{t_cy:>14.3f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
