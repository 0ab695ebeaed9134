"""Compare the compiled kernels against the pure numpy / Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from NILPACK_DISABLE_NUMBA.

    python benchmarks/bench_kernels.py [--points 200000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from nilpack import _jit, kernels
from nilpack.geodesics import ball_volume, monte_carlo_ball_volume
from nilpack.packing import solve_balanced

n, repeat = int(sys.argv[1]), int(sys.argv[2])
pts = np.random.default_rng(0).uniform(-1.5, 1.5, size=(n, 3))

def best(fn):
    fn()  # warm-up, includes compilation when numba is on
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out

res = {"numba": _jit.USE_NUMBA}
res["batch_distance_s"], d = best(lambda: kernels.distances_from_origin(pts))
res["checksum"] = float(np.sum(d))
res["ball_volume_s"], v = best(lambda: [ball_volume(r) for r in np.linspace(0.1, 6.2, 20)])
res["volume_checksum"] = float(sum(v))
res["monte_carlo_s"], _ = best(lambda: monte_carlo_ball_volume(1.0, n, seed=1))
res["solve_balanced_63_s"], _ = best(lambda: solve_balanced(6, 3))
print(json.dumps(res))
"""


def run_backend(disable: bool, n: int, repeat: int) -> dict:
    env = dict(os.environ)
    if disable:
        env["NILPACK_DISABLE_NUMBA"] = "1"
    else:
        env.pop("NILPACK_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    jit = run_backend(False, args.points, args.repeat)
    ref = run_backend(True, args.points, args.repeat)
    print(f"{'kernel':<22}{'numba [s]':>12}{'fallback [s]':>14}{'speed-up':>10}")
    for key in ("batch_distance_s", "ball_volume_s", "monte_carlo_s", "solve_balanced_63_s"):
        print(f"{key[:-2]:<22}{jit[key]:>12.4f}{ref[key]:>14.4f}{ref[key] / jit[key]:>10.1f}")
    rel = abs(jit["checksum"] - ref["checksum"]) / abs(ref["checksum"])
    vrel = abs(jit["volume_checksum"] - ref["volume_checksum"]) / abs(ref["volume_checksum"])
    print(f"distance checksum rel. diff {rel:.2e}, volume checksum rel. diff {vrel:.2e}")


if __name__ == "__main__":
    main()
