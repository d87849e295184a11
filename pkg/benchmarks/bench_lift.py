#!/usr/bin/env python3
"""Benchmark the RK4 lifting kernel: compiled extension vs pure Python.

Runs the same lift workloads through both backends and reports per-lift
wall time and the speedup.  Usage: python benchmarks/bench_lift.py
[--steps N] [--repeat K]
"""

import argparse
import time

import numpy as np

from hlift.kernel import lift_rk4, make_control_spec, tables_for
from hlift.models import bundled_model

try:
    from hlift import _lift_cy  # noqa: F401
    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def workloads():
    for name in ("heisenberg", "martinet", "engel"):
        dist, _ = bundled_model(name)
        table = tables_for(dist)
        plain = make_control_spec(dist.rank,
                                  poly_coeffs=[[0, 1]] * dist.rank)
        bumped = make_control_spec(dist.rank,
                                   poly_coeffs=[[0, 1]] * dist.rank,
                                   bumps=[(0, 1, 1e-5), (dist.rank - 1, 2, -1e-5)])
        yield f"{name}/plain", table, plain, dist.corank
        yield f"{name}/bumped", table, bumped, dist.corank


def time_backend(table, ctrl, corank, steps, repeat, backend):
    y0 = np.zeros(corank)
    lift_rk4(table, ctrl, y0, steps, backend=backend)  # warm up caches
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        lift_rk4(table, ctrl, y0, steps, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    print(f"{'workload':<20} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for label, table, ctrl, corank in workloads():
        pure = time_backend(table, ctrl, corank, args.steps, args.repeat,
                            "pure")
        if HAVE_COMPILED:
            fast = time_backend(table, ctrl, corank, args.steps, args.repeat,
                                None)
            print(f"{label:<20} {pure * 1e3:>9.2f} ms {fast * 1e3:>9.2f} ms "
                  f"{pure / fast:>8.1f}x")
        else:
            print(f"{label:<20} {pure * 1e3:>9.2f} ms {'n/a':>12} {'':>9}")
    if not HAVE_COMPILED:
        print("\ncompiled backend not built; install with a C compiler to "
              "compare")


if __name__ == "__main__":
    main()
