#!/usr/bin/env python3
"""Timing comparison of the scalar-kernel backends.

Runs the same workload in two child processes, one with
GKZFLOP_BACKEND=numpy and one with GKZFLOP_BACKEND=numba (skipped if
numba is unavailable), and prints a small table.  Compilation happens
in a warm-up pass, so the numba numbers reflect steady-state calls.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload(kernels, n_points, reps):
    import numpy as np
    rng = np.random.default_rng(0)
    zs = rng.uniform(-6, 6, n_points) + 1j * rng.uniform(-6, 6, n_points)
    results = {}

    def timed(label, fn):
        fn()  # warm-up: triggers compilation on the jit path
        best = float("inf")
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        results[label] = best

    timed("recip_gamma",
          lambda: [kernels.recip_gamma(z) for z in zs])
    timed("polygamma_stack(k<=6)",
          lambda: [kernels.polygamma_stack(z, 6) for z in zs[:n_points // 4]])
    timed("recip_gamma_series(k<=8)",
          lambda: [kernels.recip_gamma_series(z, 8)
                   for z in zs[:n_points // 4]])
    return results


def child(n_points, reps):
    from gkzflop import kernels
    out = {"backend": kernels.BACKEND,
           "times": workload(kernels, n_points, reps)}
    json.dump(out, sys.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=4000,
                    help="number of sample arguments")
    ap.add_argument("--reps", type=int, default=3,
                    help="repetitions; best time is kept")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.points, args.reps)
        return

    runs = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ)
        env["GKZFLOP_BACKEND"] = backend
        proc = subprocess.run(
            [sys.executable, __file__, "--child",
             "--points", str(args.points), "--reps", str(args.reps)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            if backend == "numba":
                print("numba backend unavailable, skipping:",
                      proc.stderr.strip().splitlines()[-1:])
                continue
            print(proc.stderr, file=sys.stderr)
            sys.exit(1)
        runs[backend] = json.loads(proc.stdout)

    labels = list(runs["numpy"]["times"])
    width = max(map(len, labels)) + 2
    header = f"{'kernel':<{width}}" + "".join(f"{b:>12}" for b in runs)
    if len(runs) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label in labels:
        row = f"{label:<{width}}"
        for b in runs:
            row += f"{runs[b]['times'][label] * 1e3:>10.2f}ms"
        if len(runs) == 2:
            ratio = runs["numpy"]["times"][label] / runs["numba"]["times"][label]
            row += f"{ratio:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
