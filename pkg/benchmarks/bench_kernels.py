#!/usr/bin/env python3
"""Numba kernels vs their pure-numpy twins: check agreement, then time both.

    python3 benchmarks/bench_kernels.py [--repeats 9]
"""

import argparse
import time

import numpy as np

from uavpp import kernels


def median_time(fn, repeats):
    fn()  # warm-up (triggers compilation on first call)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def cases(rng):
    for n in (105, 210, 1000):
        obj = rng.random((n, 4))
        viol = np.where(rng.random(n) < 0.2, rng.random(n), 0.0)
        scale = np.zeros(4)
        front = rng.random((n, 2))
        yield f"nds n={n}", (kernels.nds_ranks_loop, kernels.nds_ranks_numpy, (obj, viol))
        yield f"crowding n={n}", (kernels.crowding_loop, kernels.crowding_numpy, (obj, scale))
        yield f"hv2d n={n}", (kernels.hv2d_loop, kernels.hv2d_numpy, (front, 1.1, 1.1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba not installed: the loop kernels run as plain Python")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8}")
    for name, (loop, vec, argv) in cases(rng):
        a, b = loop(*argv), vec(*argv)
        assert np.allclose(a, b), name
        t_loop = median_time(lambda: loop(*argv), args.repeats)
        t_vec = median_time(lambda: vec(*argv), args.repeats)
        print(f"{name:<18} {1e3 * t_loop:>11.3f} {1e3 * t_vec:>11.3f} {t_vec / t_loop:>8.1f}x")


if __name__ == "__main__":
    main()
