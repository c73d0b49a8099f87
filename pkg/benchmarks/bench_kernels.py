"""Time the compiled and interpreted kernels on the same workloads.

Each backend runs in its own interpreter, selected through
``PWFINSLER_PURE_PYTHON``.  Usage::

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, sys, time
import numpy as np
from pwfinsler._kernels import BACKEND
from pwfinsler.minkowski import QuarticNorm, RandersNorm
from pwfinsler import fixtures as fx
from pwfinsler.classify import curvature_table

repeat = int(sys.argv[1])
Q = QuarticNorm(0.5)
R = RandersNorm([[1.0, 0.2], [0.2, 1.4]], (0.2, -0.3))
v = np.array([1.0, 0.3])


def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def evals():
    for t in np.linspace(0, 6.28, 20000):
        Q.eval((math.cos(t), math.sin(t)))


def arcs():
    for a in np.linspace(0, 6, 200):
        Q.measure(a, a + 1.0, 1e-10)
        R.measure(a, a + 1.0, 1e-10)


def crossings():
    for target in np.linspace(-0.95, 0.95, 2000):
        Q.solve_crossing(v, 1, target)


def surface():
    curvature_table(fx.quartic_cube(0.5), 8)


print(json.dumps({"backend": BACKEND, "eval x20000": best(evals),
                  "arc x400": best(arcs), "crossing x2000": best(crossings),
                  "quartic cube curvature": best(surface)}))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ, PWFINSLER_PURE_PYTHON="1" if pure else "0")
    r = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(r.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if fast["backend"] == slow["backend"]:
        print(f"note: compiled kernels unavailable, both runs used {fast['backend']}")
    print(f"{'workload':<26}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<26}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
