"""Compare the compiled and pure-numpy accumulation kernels.

Usage: python benchmarks/bench_kernels.py [--reps 200000] [--window 81]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nextpm.costs import _simulate_paths
from nextpm.kernels import get_backend
from nextpm.lifetime import ComponentSpec
from nextpm.streams import substream


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=200_000)
    parser.add_argument("--window", type=int, default=81)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    spec = ComponentSpec(id=3, alpha=80, beta=3, cm_cost=202, pm_cost=46.75)
    rng = substream(7, "bench")
    t_grid = np.arange(1, args.window + 1, dtype=np.float64)
    prev, lives, fails, _ = _simulate_paths(spec, 0.0, 0.0, float(args.window),
                                            -1.0, args.reps, rng)
    d_ext = np.full(2 * args.window + 3, 10.0)
    print(f"paths: {fails.shape[0]} x {fails.shape[1]} renewal rounds, "
          f"{len(t_grid)} target months")

    results = {}
    for name in ("python", "cython"):
        try:
            backend = get_backend(name)
        except ImportError as exc:
            print(f"{name:8s} unavailable: {exc}")
            continue
        best = np.inf
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            acc = backend.accumulate_pm_g(prev, lives, fails, t_grid, 0.0,
                                          spec.cm_cost, spec.pm_cost, 3.0, d_ext)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, acc)
        print(f"{name:8s} {best * 1e3:8.1f} ms   checksum {acc.sum():.6f}")

    if len(results) == 2:
        py_t, py_acc = results["python"]
        cy_t, cy_acc = results["cython"]
        identical = np.array_equal(py_acc, cy_acc)
        print(f"speedup cython vs python: {py_t / cy_t:.1f}x   "
              f"bit-identical: {identical}")


if __name__ == "__main__":
    main()
