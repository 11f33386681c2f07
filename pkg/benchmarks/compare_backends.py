#!/usr/bin/env python3
"""Benchmark the compiled trajectory kernels against the numpy fallback.

Times the three hot entry points on a medium workload, checks that the two
backends agree, and prints a speedup table:

    python benchmarks/compare_backends.py [--n 128] [--trials 512] [--steps 400]
"""

import argparse
import time

import numpy as np

from shuffle_lab import backend, spectral


def time_call(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--trials", type=int, default=512)
    ap.add_argument("--steps", type=int, default=400)
    args = ap.parse_args()

    try:
        compiled = backend.get_backend("compiled")
    except RuntimeError:
        raise SystemExit("compiled kernels not built; nothing to compare")
    fallback = backend.get_backend("fallback")

    n, trials, steps = args.n, args.trials, args.steps
    s = spectral.TrackedStatistic(n)
    start, _ = spectral.phi_max_start(s)
    flags = s.tracked_flags(start)
    cosv = s.cos_table()
    ts = np.arange(1, steps + 1, dtype=np.int64)

    workloads = [
        (
            f"simulate_phi overhand n={n} x{trials} x{steps}",
            lambda k: k.simulate_phi(0, n, 0.5, flags, cosv, ts, trials, 7, 0),
        ),
        (
            f"simulate_phi rudvalis n={n} x{trials} x{steps}",
            lambda k: k.simulate_phi(2, n, 0.0, flags, cosv, ts, trials, 7, 0),
        ),
        (
            f"uniform_phi n={n} x{8 * trials}",
            lambda k: k.uniform_phi(n, flags, cosv, 8 * trials, 7, 0),
        ),
        (
            f"phi_second_moment overhand n={n} x{4 * trials}",
            lambda k: k.phi_second_moment(0, n, 0.5, flags, cosv, 1, 4 * trials, 7, 0),
        ),
    ]

    print(f"{'workload':<48} {'compiled':>10} {'fallback':>10} {'speedup':>8}")
    for name, fn in workloads:
        tc, outc = time_call(fn, compiled)
        tf, outf = time_call(fn, fallback)
        err = float(np.max(np.abs(np.asarray(outc) - np.asarray(outf))))
        if err > 1e-9:
            raise SystemExit(f"backend mismatch on {name}: {err}")
        print(f"{name:<48} {tc * 1e3:>8.1f}ms {tf * 1e3:>8.1f}ms {tf / tc:>7.1f}x")


if __name__ == "__main__":
    main()
