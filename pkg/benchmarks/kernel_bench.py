"""Benchmark the event kernel: numba JIT vs pure-NumPy fallback.

Usage: python3 benchmarks/kernel_bench.py [--events N]

Runs the same trajectory in two subprocesses (the kernel path is fixed
at import time by LATGAS_NO_NUMBA) and reports events/second.
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

_WORKER = textwrap.dedent("""
    import json, time
    import numpy as np
    from latgas import _kernels
    from latgas.kmc import SimParams, run
    from latgas.sampling import GrandCanonicalParams, sample_grand_canonical

    max_events = int(__MAX_EVENTS__)
    rng = np.random.default_rng(0)
    cfg = sample_grand_canonical(GrandCanonicalParams(0.3, 0.2), 64, rng)
    params = SimParams(n=64, d_t=1.0, v0=1.0, d_r=1.0, t_end=1e9, seed=7)
    # warm-up triggers JIT compilation outside the timed section
    run(sample_grand_canonical(GrandCanonicalParams(0.3, 0.2), 16, rng),
        SimParams(n=16, d_t=1.0, v0=1.0, d_r=1.0, t_end=1e9, seed=1),
        max_events=100)
    t0 = time.perf_counter()
    _, clock = run(cfg, params, max_events=max_events)
    dt = time.perf_counter() - t0
    print(json.dumps({"numba": _kernels.USE_NUMBA,
                      "events": clock.event_count, "seconds": dt}))
""")


def run_mode(no_numba, max_events):
    env = dict(os.environ)
    env["LATGAS_NO_NUMBA"] = "1" if no_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-c",
         _WORKER.replace("__MAX_EVENTS__", str(max_events))],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--events", type=int, default=2 * 10 ** 6,
                    help="accepted events per timed run (numba path); "
                         "the fallback runs 1/50 of this")
    args = ap.parse_args()

    fast = run_mode(False, args.events)
    slow = run_mode(True, max(args.events // 50, 10 ** 4))
    for label, r in (("numba", fast), ("fallback", slow)):
        rate = r["events"] / r["seconds"]
        print(f"{label:9s} events={r['events']:>9d} "
              f"time={r['seconds']:8.3f}s rate={rate:12.0f}/s")
    speedup = (fast["events"] / fast["seconds"]) / \
        (slow["events"] / slow["seconds"])
    print(f"speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
