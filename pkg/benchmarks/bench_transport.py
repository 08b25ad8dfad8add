"""Time the compiled and numpy transport kernels on the bundled five-spot.

Usage: python3 benchmarks/bench_transport.py [--steps 500] [--repeat 3]
"""
import argparse
import time
from dataclasses import replace

import numpy as np

from wellopt.objectives.kernels import BACKENDS
from wellopt.objectives.scenarios import load_case
from wellopt.objectives.simulator import simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    case = load_case("builtin:fivespot_51")
    model = replace(case.model, report_steps=args.steps)
    wells = [replace(w, control=w.control.with_values(w.control.values[:1])) for w in case.wells]
    timings, outputs = {}, {}
    for name in sorted(BACKENDS):
        best = np.inf
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            series, state = simulate(model, wells, backend=name, full_output=True)
            best = min(best, time.perf_counter() - t0)
        timings[name] = best
        outputs[name] = state.water_saturation
        print(f"{name:9s} {best:8.3f} s  ({state.substeps} substeps, {args.steps} report steps)")
    if len(timings) == 2:
        diff = float(np.max(np.abs(outputs["compiled"] - outputs["python"])))
        print(f"speedup   {timings['python'] / timings['compiled']:8.2f}x  max |dSw| = {diff:.2e}")
    else:
        print("compiled extension not built; only the numpy kernel was timed")


if __name__ == "__main__":
    main()
