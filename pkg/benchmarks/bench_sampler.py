"""Benchmark the push-block sampler: numba path vs pure-python fallback.

The backend is selected at import time via the ``WANDERLINES_NO_NUMBA``
environment variable, so each timing runs in a fresh subprocess.  The numba
timing excludes JIT compilation (one warm-up draw before the clock starts).

Usage: python3 benchmarks/bench_sampler.py [--N 400] [--reps 5]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from wanderlines.sampler import NoiseField, SamplerConfig, mix_seed, sample_schur
from wanderlines import _engine

N, reps = int(sys.argv[1]), int(sys.argv[2])
cfg = SamplerConfig((0.5,) * (N + int(N ** 0.75) + 1), (0.5,) * N)
sample_schur(cfg, NoiseField(0), max_parts=3)  # warm-up (JIT compile)
t0 = time.perf_counter()
for r in range(reps):
    sample_schur(cfg, NoiseField(mix_seed(1, r)), max_parts=3)
dt = time.perf_counter() - t0
print(json.dumps({"backend": "numba" if _engine.USE_NUMBA else "python",
                  "N": N, "reps": reps, "seconds": dt,
                  "per_draw": dt / reps}))
"""


def run(no_numba: bool, N: int, reps: int) -> dict:
    env = dict(os.environ)
    env["WANDERLINES_NO_NUMBA"] = "1" if no_numba else ""
    out = subprocess.run([sys.executable, "-c", _WORKER, str(N), str(reps)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=400)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()
    numba = run(False, args.N, args.reps)
    python = run(True, args.N, max(1, args.reps // 5))
    speedup = python["per_draw"] / numba["per_draw"]
    for row in (numba, python):
        print(f"{row['backend']:>7}: {row['per_draw'] * 1e3:9.2f} ms/draw "
              f"(N={row['N']}, reps={row['reps']})")
    print(f"speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
