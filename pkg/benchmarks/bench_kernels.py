"""Time the numba kernels against the pure-Python fallback (WRP_NO_NUMBA=1).

Each mode runs in its own interpreter because the switch is read at import.
Usage: python benchmarks/bench_kernels.py [--side 8] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from wrpmesh import _accel
from wrpmesh.experiments import random_scenario
from wrpmesh.graphs import build_graph, shortest_grid_path, shortest_vertex_path
from wrpmesh.oracle import SteinerConfig, approx_shortest_path

side, repeat = int(sys.argv[1]), int(sys.argv[2])
scs = [random_scenario(k, side, side, seed=s) for k in ("Square", "Hex") for s in range(repeat)]
# warm-up compiles (or loads cached) kernels outside the timed region
sc = random_scenario("Square", 3, 3, seed=0)
shortest_vertex_path(sc.mesh, sc.weight_field, sc.source, sc.target)
approx_shortest_path(sc.mesh, sc.weight_field, sc.source, sc.target)
out = {"numba": _accel.USE_NUMBA}
for name, fn in (
        ("grid", lambda s: shortest_grid_path(build_graph(s.mesh, s.weight_field, s.schemes[-1]), s.source, s.target)),
        ("vertex", lambda s: shortest_vertex_path(s.mesh, s.weight_field, s.source, s.target)),
        ("oracle", lambda s: approx_shortest_path(s.mesh, s.weight_field, s.source, s.target, SteinerConfig(m=12)))):
    t = time.perf_counter()
    costs = [fn(s)[1] for s in scs]
    out[name] = (time.perf_counter() - t, costs)
print(json.dumps(out))
"""


def run(no_numba: bool, side: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("WRP_NO_NUMBA", None)
    if no_numba:
        env["WRP_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKLOAD, str(side), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--side", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.side, args.repeat)
    slow = run(True, args.side, args.repeat)
    print(f"{'stage':8s} {'numba s':>10s} {'python s':>10s} {'speed-up':>9s}  same costs")
    for stage in ("grid", "vertex", "oracle"):
        tf, cf = fast[stage]
        ts, cs = slow[stage]
        print(f"{stage:8s} {tf:10.3f} {ts:10.3f} {ts / tf:9.1f}  {cf == cs}")
    if not fast["numba"]:
        print("note: numba is unavailable, both columns ran the fallback")


if __name__ == "__main__":
    main()
