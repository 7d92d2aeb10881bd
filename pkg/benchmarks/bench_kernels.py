"""Benchmark the jitted hot kernels against their pure-Python fallbacks.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--steps N] [--repeats R]

The jitted path is whatever ``eprlock.kernels`` selected at import time
(numba unless EPRLOCK_NO_NUMBA=1); the fallback functions carry the
``_py`` suffix and are always available, so both columns are measured in
a single process. The first jitted call is excluded from timing
(compilation).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from eprlock import kernels
from eprlock.backend import ENV_FLAG, NUMBA_ENABLED


def _time(fn, args, repeats):
    fn(*args)  # warm-up / JIT compile
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cavity(steps, repeats):
    args = (0.0 + 0j, 0.0 + 0j, 0.5 + 0j, 1.0, 0.3, 1.0 + 0j, 0.02, steps, 1e6)
    return (
        _time(kernels.cavity_rk4, args, repeats),
        _time(kernels.cavity_rk4_py, args, repeats),
    )


def bench_servo(steps, repeats):
    rng = np.random.default_rng(0)
    dist = np.cumsum(rng.normal(0.0, 1e-3, steps))
    args = (dist, 5e-6, 1.0, 0.01, 5e3, 0.27, 1.26e5, 1.26e4, 20.0)
    return (
        _time(kernels.servo_loop, args, repeats),
        _time(kernels.servo_loop_py, args, repeats),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=400_000, help="samples per kernel call")
    parser.add_argument("--repeats", type=int, default=5, help="timed repetitions (best taken)")
    args = parser.parse_args()

    backend = "numba njit" if NUMBA_ENABLED else f"pure Python ({ENV_FLAG} set)"
    print(f"selected backend: {backend}; {args.steps} steps, best of {args.repeats}")
    print(f"{'kernel':<12} {'selected (s)':>14} {'pure Python (s)':>16} {'speedup':>9}")
    for name, fn in (("cavity_rk4", bench_cavity), ("servo_loop", bench_servo)):
        fast, slow = fn(args.steps, args.repeats)
        print(f"{name:<12} {fast:>14.4f} {slow:>16.4f} {slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
