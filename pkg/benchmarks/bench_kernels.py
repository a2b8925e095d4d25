"""Compare the numba kernels with the pure-numpy path.

Each backend runs in its own interpreter because the choice is made at import
time from LORENTZHOL_DISABLE_NUMBA. The first call in each child is a warm-up,
so numba compile (or cache load) time is reported separately.

    python benchmarks/bench_kernels.py [--repeat 3] [--loops 50]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from lorentzhol._accel import backend_name
from lorentzhol.expr import PolyExpr
from lorentzhol.minkowski import group_closure
from lorentzhol.paths import PathSpec
from lorentzhol.ppwave import ppwave_chart, transport_with_info
from lorentzhol.quotient import flat_rotation_generator

loops, repeat = int(sys.argv[1]), int(sys.argv[2])
chart = ppwave_chart(PolyExpr.monomials(4, [((0, 2, 0, 0), 1.0), ((0, 0, 2, 0), 1.0)]), 2)
rng = np.random.default_rng(0)
base = np.zeros(4)
paths = [PathSpec.polyline([base, rng.uniform(-1.5, 1.5, 4), rng.uniform(-1.5, 1.5, 4)], closed=True)
         for _ in range(loops)]

t0 = time.perf_counter()
transport_with_info(chart, paths[0])
group_closure([flat_rotation_generator(1.0)], 3)
warm = time.perf_counter() - t0

def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)

transport = best(lambda: [transport_with_info(chart, p) for p in paths])
gens = [flat_rotation_generator(2 * np.pi / 7), flat_rotation_generator(1.0)]
closure = best(lambda: group_closure(gens, 7))
print(json.dumps({"backend": backend_name(), "warmup": warm, "transport": transport, "closure": closure}))
"""


def run_child(disable: bool, loops: int, repeat: int) -> dict:
    env = dict(os.environ)
    env["LORENTZHOL_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", CHILD, str(loops), str(repeat)], env=env,
                         capture_output=True, text=True)
    if out.returncode:
        raise SystemExit(f"benchmark child failed:\n{out.stderr}")
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--loops", type=int, default=50)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    rows = [run_child(False, args.loops, args.repeat), run_child(True, args.loops, args.repeat)]
    print(f"{'backend':8s} {'warm-up s':>10s} {'transport s':>12s} {'closure s':>10s}")
    for r in rows:
        print(f"{r['backend']:8s} {r['warmup']:10.3f} {r['transport']:12.3f} {r['closure']:10.3f}")
    fast, slow = rows
    if fast["backend"] == "numba":
        print(f"speed-up  transport x{slow['transport'] / fast['transport']:.1f}, "
              f"closure x{slow['closure'] / fast['closure']:.1f}")
    else:
        print("numba is not installed; both rows use the numpy path")


if __name__ == "__main__":
    main()
