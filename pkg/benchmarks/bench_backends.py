#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the same workloads in a fresh subprocess per backend (selection happens
at import time via MOEBIUS_LAB_BACKEND) and prints a comparison table.

    python benchmarks/bench_backends.py [--grid 32] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from moebius_lab import _backend
from moebius_lab import surfaces, lifts, frames, invariants

grid = int(sys.argv[1])
repeat = int(sys.argv[2])

chart = surfaces.catalog_get("clifford")
mu = lifts.MuSpec.parse("zero")

# warm-up: trigger JIT compilation / cache loads outside the timings
frames.frame_field(chart, mu, 4, 4)
invariants.willmore_energy(chart, 8, 8)

results = {"backend": _backend.BACKEND}

best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    frames.frame_field(chart, mu, grid, grid)
    best = min(best, time.perf_counter() - t0)
results["frame_field"] = best

best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    invariants.willmore_energy(chart, grid, grid)
    best = min(best, time.perf_counter() - t0)
results["energy"] = best

best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    data = invariants.compute_invariants(chart, 0.3, 0.7)
    lift = lifts.build_lift(data, mu)
    frames.maurer_cartan_closed(data, lift)
    best = min(best, time.perf_counter() - t0)
results["single_point"] = best

print(json.dumps(results))
"""


def run_backend(backend: str, grid: int, repeat: int) -> dict:
    env = dict(os.environ, MOEBIUS_LAB_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(grid), str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rows = []
    for backend in ("numpy", "numba"):
        try:
            rows.append(run_backend(backend, args.grid, args.repeat))
        except subprocess.CalledProcessError as exc:
            print(f"[{backend}] failed:\n{exc.stderr}", file=sys.stderr)

    if not rows:
        return 1
    keys = ["frame_field", "energy", "single_point"]
    header = f"{'workload':<28}" + "".join(f"{row['backend']:>14}" for row in rows)
    if len(rows) == 2:
        header += f"{'speedup':>10}"
    print(f"grid {args.grid}x{args.grid}, best of {args.repeat}")
    print(header)
    print("-" * len(header))
    labels = {
        "frame_field": f"frame field {args.grid}x{args.grid} [s]",
        "energy": f"energy grid {args.grid}x{args.grid} [s]",
        "single_point": "single-point pipeline [s]",
    }
    for key in keys:
        line = f"{labels[key]:<28}" + "".join(f"{row[key]:>14.4f}" for row in rows)
        if len(rows) == 2 and rows[1][key] > 0:
            line += f"{rows[0][key] / rows[1][key]:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
