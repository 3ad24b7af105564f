#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-NumPy fallback.

Times the two hot entry points (single rates solve, full one-period RK4
integration) and a 13-phase sweep built on them. Run directly:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import statistics
import time

import numpy as np

from scallop_pair import ScallopPairParams
from scallop_pair._kernels import available_backends, get_backend

PARAMS = ScallopPairParams(L=10.0, h=1.0, a=0.25, c_par=1.0, c_perp=2.0).nondimensionalized()
ARGS = (PARAMS.lambda_, PARAMS.L, PARAMS.c_par, PARAMS.c_perp)
STATE = np.array([0.0, 0.0, 0.0, 0.0, PARAMS.h, 0.0, math.pi + 0.1, math.pi])
PERIOD = 2.0 * math.pi / 20.0


def time_best(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_backend(name: str, repeats: int) -> dict:
    backend = get_backend(name)

    def rates_many(n=200):
        for _ in range(n):
            backend.rates_and_det(STATE, 0.3, -0.7, *ARGS)

    def one_period_run(n_steps=2000):
        out = backend.integrate_stroke(STATE, *ARGS, backend.SINUSOIDAL,
                                       0.1, 20.0, math.pi / 2, n_steps,
                                       PERIOD / n_steps)
        assert out[2] == 0

    def sweep13(n_steps=2000):
        for phi in np.linspace(0.0, math.pi, 13):
            out = backend.integrate_stroke(STATE, *ARGS, backend.SINUSOIDAL,
                                           0.1, 20.0, float(phi), n_steps,
                                           PERIOD / n_steps)
            assert out[2] == 0

    return {
        "rates_us": time_best(rates_many, repeats) / 200 * 1e6,
        "period_ms": time_best(one_period_run, repeats) * 1e3,
        "sweep_s": time_best(sweep13, max(1, repeats // 3)),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    results = {}
    for name in available_backends():
        results[name] = bench_backend(name, args.repeats)

    header = f"{'backend':<10} {'rates solve':>14} {'1-period RK4':>14} {'13-phase sweep':>16}"
    print(header)
    print("-" * len(header))
    for name, r in results.items():
        print(f"{name:<10} {r['rates_us']:>11.2f} us {r['period_ms']:>11.2f} ms "
              f"{r['sweep_s']:>13.3f} s")
    if "compiled" in results and "python" in results:
        speedup = results["python"]["period_ms"] / results["compiled"]["period_ms"]
        print(f"\ncompiled speedup on the RK4 loop: {speedup:.0f}x")


if __name__ == "__main__":
    main()
