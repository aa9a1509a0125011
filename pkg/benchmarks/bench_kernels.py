"""Compiled kernels vs the pure-numpy fallback.

Each mode runs in its own interpreter because the backend is chosen once,
at import time, from ``COMBSS_CPD_DISABLE_NUMBA``.

    python3 benchmarks/bench_kernels.py [--reps 20] [--sizes 1000,10000]
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

WORKER = r"""
import json, statistics, sys, time
import numpy as np
from combss_cpd import _accel
from combss_cpd.combss import CombssOptions, run_combss
from combss_cpd.linalg import DiagonalScaling, mt_solve
from combss_cpd.simgen import experiment_config, simulate

sizes, reps = json.loads(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)

def median_ms(fn):
    fn()  # warm-up; pays for compilation or cache loading
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1e3 * statistics.median(times)

out = {"numba": _accel.NUMBA_ENABLED, "mt_solve": {}}
for n in sizes:
    scale = DiagonalScaling.from_t(rng.uniform(0.05, 0.95, n))
    b = rng.normal(size=n)
    out["mt_solve"][str(n)] = median_ms(lambda: mt_solve(scale, b))

y = simulate(experiment_config("A1").spec_for(2.0), 1)
opts = CombssOptions(max_iterations=300, convergence_tol=1e-12)
out["run_combss_n150_300it"] = median_ms(lambda: run_combss(y, 0.05, opts))
print(json.dumps(out))
"""


def run_mode(disable: bool, sizes, reps) -> dict:
    env = dict(os.environ, COMBSS_CPD_DISABLE_NUMBA="1" if disable else "0")
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(sizes), str(reps)],
        env=env, capture_output=True, text=True, check=True,
    )
    result = json.loads(proc.stdout)
    result["process_s"] = time.perf_counter() - start
    return result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--sizes", default="1000,10000")
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    fast = run_mode(False, sizes, args.reps)
    slow = run_mode(True, sizes, args.reps)
    if not fast["numba"]:
        print("numba is not importable; both columns use the fallback")

    print(f"{'kernel':<28}{'numba ms':>12}{'fallback ms':>14}{'speed-up':>10}")
    rows = [(f"mt_solve n={n}", fast["mt_solve"][str(n)], slow["mt_solve"][str(n)])
            for n in sizes]
    rows.append(("run_combss n=150, 300 it", fast["run_combss_n150_300it"],
                 slow["run_combss_n150_300it"]))
    for name, a, b in rows:
        print(f"{name:<28}{a:>12.3f}{b:>14.3f}{b / a:>9.1f}x")
    print(f"process wall time: numba {fast['process_s']:.1f}s, "
          f"fallback {slow['process_s']:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
