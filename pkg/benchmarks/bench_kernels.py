"""Time the A* and annealing kernels with numba and with the plain Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from GRIDNAV_DISABLE_JIT.  Results from both backends are compared so a
speedup never hides a behavioural difference.

    python3 benchmarks/bench_kernels.py [--grids 20] [--size 40] [--keypoints 8] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from gridnav import _accel
from gridnav.gridmap import GridMap, KeyPointSet
from gridnav.kernels import astar_grid
from gridnav.tour import SaConfig, anneal, pairwise_distances

grids, size, n, repeat = map(int, sys.argv[1:5])
rng = np.random.default_rng(7)
maps = []
for _ in range(grids):
    blocked = rng.random((size, size)) < 0.2
    blocked[0, 0] = blocked[-1, -1] = False
    maps.append(blocked)

# Warm up once so compilation is not timed.
astar_grid(maps[0], 0, 0, size - 1, size - 1)

def run_astar():
    return [int(astar_grid(b, 0, 0, size - 1, size - 1)[0]) for b in maps]

free = np.argwhere(~maps[0])
picks = free[rng.choice(len(free), size=n, replace=False)]
cells = [tuple(int(v) for v in p) for p in picks]
grid = GridMap(np.zeros((size, size), dtype=bool))
dm = pairwise_distances(grid, KeyPointSet(cells[0], tuple(cells[1:])))
anneal(dm, SaConfig(rng_seed=1, iterations_per_temperature=5))

def run_sa():
    return anneal(dm, SaConfig(rng_seed=1)).tour.total_cost

def best_of(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out

t_astar, costs = best_of(run_astar)
t_sa, sa_cost = best_of(run_sa)
print(json.dumps({"backend": _accel.backend_name(), "astar_s": t_astar, "sa_s": t_sa,
                  "astar_costs": costs, "sa_cost": sa_cost}))
"""


def run_backend(disable_jit, args):
    env = dict(os.environ)
    env.pop("GRIDNAV_DISABLE_JIT", None)
    if disable_jit:
        env["GRIDNAV_DISABLE_JIT"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(args.grids), str(args.size), str(args.keypoints), str(args.repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grids", type=int, default=20)
    parser.add_argument("--size", type=int, default=40)
    parser.add_argument("--keypoints", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    jit = run_backend(False, args)
    py = run_backend(True, args)
    same = jit["astar_costs"] == py["astar_costs"] and jit["sa_cost"] == py["sa_cost"]

    print(f"{'kernel':<10}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for name, key in (("astar", "astar_s"), ("anneal", "sa_s")):
        print(f"{name:<10}{jit[key]:>12.4f}{py[key]:>12.4f}{py[key] / jit[key]:>9.1f}x")
    print(f"results identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
