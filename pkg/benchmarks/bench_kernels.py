"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--states N] [--repeat R]

Both backends are imported directly, so the result does not depend on
CVBELL_PURE_PYTHON. Outputs are compared before timing.
"""
import argparse
import sys
import timeit

import numpy as np

from cvbell import _kernels_py, tmsv_covariance
from cvbell.verification import sample_arrays

try:
    from cvbell import _kernels
except ImportError:
    _kernels = None


def cases(states):
    batch = sample_arrays(states, 0)
    cols = (batch.n, batch.m, batch.c1, batch.c2)
    cov = tmsv_covariance(0.5, 0.05).entries
    vinv = np.linalg.inv(cov)
    pref = 1.0 / np.sqrt(np.linalg.det(cov))
    pts = np.random.default_rng(0).normal(size=(states, 4))
    xs = np.linspace(0.0, 1.0, 10_001)
    return {
        "scan_states": lambda k: k.scan_states(*cols),
        "bell_points": lambda k: k.bell_points(vinv, pref, pts),
        "taylor_grid": lambda k: k.taylor_grid(xs),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; only the pure-Python timings are shown")
    print(f"{'kernel':<14}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, run in cases(args.states).items():
        py = min(timeit.repeat(lambda: run(_kernels_py), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:<14}{py:>12.4f}{'-':>12}{'-':>10}")
            continue
        np.testing.assert_allclose(run(_kernels), run(_kernels_py), rtol=1e-12, equal_nan=True)
        cy = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
        print(f"{name:<14}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
