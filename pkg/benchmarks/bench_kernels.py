"""Time the compiled kernels against the pure-Python fallback.

Each backend runs in its own interpreter because the backend is chosen at
import time from CROSSFIELD_PURE_PYTHON.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, sys, timeit
import numpy as np
from crossfield import kernels

repeat = int(sys.argv[1])
lam = 3e8 / 100e9
u = math.sqrt(0.5)

def crossing():
    return kernels.ula_crossing(lam / 2, u, 0.0, u, 5.0, lam, 2, 1, math.pi / 8, 4096)

rng = np.random.default_rng(0)
n = 2000
tx, rx = np.zeros(3), np.array([100.0, 0.0, -23.5])
base = np.linalg.norm(rx - tx)
ut = rng.standard_normal((n, 3)); ut /= np.linalg.norm(ut, axis=1, keepdims=True)
ur = rng.standard_normal((n, 3)); ur /= np.linalg.norm(ur, axis=1, keepdims=True)
total = base * (1.0 + rng.exponential(0.5, n))
rt = rng.uniform(0.05, 0.5, n) * (total - base)
fbs = tx + rt[:, None] * ut

def solve():
    return kernels.solve_rr_batch(tx, rx, fbs, ur, rt, total, 1e-12)

out = {"backend": kernels.BACKEND, "crossing": crossing(), "solve_sum": float(solve().sum())}
out["ula_crossing_s"] = min(timeit.repeat(crossing, number=1, repeat=repeat))
out["solve_rr_batch_s"] = min(timeit.repeat(solve, number=1, repeat=repeat))
print(json.dumps(out))
"""


def _run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ, CROSSFIELD_PURE_PYTHON="1" if pure else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(res.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled, python = _run(False, args.repeat), _run(True, args.repeat)
    if compiled["backend"] != "compiled":
        print("compiled extension not available; both runs used the Python fallback")
    for key in ("crossing", "solve_sum"):
        if compiled[key] != python[key]:
            print(f"warning: backends disagree on {key}: {compiled[key]} vs {python[key]}")
    print(f"{'kernel':18s} {'compiled s':>12s} {'python s':>12s} {'speed-up':>9s}")
    for key in ("ula_crossing_s", "solve_rr_batch_s"):
        c, p = compiled[key], python[key]
        print(f"{key[:-2]:18s} {c:12.6f} {p:12.6f} {p / c:9.1f}")


if __name__ == "__main__":
    main()
