"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_backends.py [--points 2000] [--samples 1000] [--repeat 5]

Kernels from both backends are imported directly and checked for equality
before timing. The end-to-end row runs ``ccexplore solve`` once per
``CCEXPLORE_BACKEND`` value in a subprocess (import and JIT cache load
included).
"""
import argparse
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from ccexplore import _kernels_numba as nbk
from ccexplore import _kernels_numpy as npk

A = np.array([1.5, 2.0])
B = np.array([2.0, 3.0])


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--points", type=int, default=2000)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    U = rng.uniform(-6, 5, size=(args.points, 2))
    d = rng.standard_normal(args.samples)

    cases = {
        "poly_cost": (U,),
        "poly_constraint": (U, d, A, B),
        "poly_violation_counts": (U, d, A, B),
        "poly_scenario_check": (U, d, A, B),
    }
    print(f"{args.points} points x {args.samples} samples, best of {args.repeat}")
    print(f"{'kernel':24s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, call_args in cases.items():
        f_np, f_nb = getattr(npk, name), getattr(nbk, name)
        r_np, r_nb = f_np(*call_args), f_nb(*call_args)  # warm-up / JIT
        if isinstance(r_np, tuple):
            assert all(np.array_equal(x, y) for x, y in zip(r_np, r_nb)), name
        else:
            assert np.array_equal(r_np, r_nb), name
        t_np = best_of(f_np, call_args, args.repeat)
        t_nb = best_of(f_nb, call_args, args.repeat)
        print(f"{name:24s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:8.1f}x")

    wall = {}
    with tempfile.TemporaryDirectory() as tmp:
        for backend in ("numpy", "numba"):
            env = dict(os.environ, CCEXPLORE_BACKEND=backend)
            cmd = [sys.executable, "-m", "ccexplore", "solve", "--output-prefix", os.path.join(tmp, backend)]
            t0 = time.perf_counter()
            subprocess.run(cmd, check=True, env=env, capture_output=True)
            wall[backend] = time.perf_counter() - t0
    print(f"{'solve (end to end)':24s} {1e3 * wall['numpy']:12.0f} {1e3 * wall['numba']:12.0f} "
          f"{wall['numpy'] / wall['numba']:8.1f}x")


if __name__ == "__main__":
    main()
