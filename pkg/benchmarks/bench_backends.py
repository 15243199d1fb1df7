"""Compare the numba and pure-numpy backends on the hot integration paths.

Each backend runs in its own interpreter because the switch is read at
import time. Compilation is excluded: every workload runs once before it
is timed.

    python3 benchmarks/bench_backends.py [--repeat 3] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import sensireach
from sensireach.pipeline import step3_sx_set
from sensireach.problems import unicycle_problem
from sensireach.interval import IntervalMatrix
from sensireach.sensitivity import flow, flow_with_second_sensitivity

repeat = int(sys.argv[1])
prob = unicycle_problem()
x0 = prob.x0.center
zero = IntervalMatrix.zeros((6, 36))

workloads = {
    "flow (6 states)": lambda: flow(prob.model, 0.0, 10.0, x0),
    "second-order sensitivity (258 states)": lambda: flow_with_second_sensitivity(prob.model, 0.0, 10.0, x0),
    "step 3, a=2 (64 x 42 states)": lambda: step3_sx_set(prob, zero, 2),
}
out = {"backend": sensireach.BACKEND, "timings": {}}
for name, func in workloads.items():
    func()
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    out["timings"][name] = best
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("NUMBA_DISABLE_JIT", None)
    env["SENSIREACH_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="also write the raw timings here")
    args = parser.parse_args(argv)
    jit, plain = run(False, args.repeat), run(True, args.repeat)
    if jit["backend"] != "numba":
        print("numba is not installed; only the numpy backend was measured")
    print(f"{'workload':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, t_plain in plain["timings"].items():
        t_jit = jit["timings"][name]
        print(f"{name:42s} {t_jit:10.4f} {t_plain:10.4f} {t_plain / t_jit:8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"numba": jit, "numpy": plain}, fh, indent=2)


if __name__ == "__main__":
    main()
