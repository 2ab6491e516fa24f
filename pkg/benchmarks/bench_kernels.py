#!/usr/bin/env python3
"""Benchmark: compiled enumeration kernels vs the NumPy fallback.

Times the hot paths behind the exhaustive experiments (sign-pattern
enumeration, sign-vector enumeration, balanced-subset scans, batched
p-powers) on both backends and prints the speedups.

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from schattenlab import _kernels_py

try:
    from schattenlab import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def build_tasks(quick):
    rng = np.random.default_rng(42)
    a44 = _cgauss(rng, 4, 4)
    a45 = _cgauss(rng, 4, 5)
    ts = _cgauss(rng, 14 if not quick else 10, 8, 8)
    z12 = _cgauss(rng, 12, 12)
    np.fill_diagonal(z12, 0.0)
    z16 = _cgauss(rng, 16, 16)
    np.fill_diagonal(z16, 0.0)
    batch = _cgauss(rng, 200_000 if not quick else 20_000, 3, 3)

    tasks = [
        ("sign patterns 4x4 (2^16), p=3", lambda k: k.sign_enum_ppower_sum(a44, 3.0)),
        ("sign vectors k=%d of 8x8, p=3" % ts.shape[0], lambda k: k.sign_vector_enum_ppower_sum(ts, 3.0)),
        ("balanced scan 12x12 (462 subsets), p=4", lambda k: k.balanced_subset_scan(z12, 4.0)[2]),
        ("balanced scan 16x16 (6435 subsets), p=4", lambda k: k.balanced_subset_scan(z16, 4.0)[2]),
        ("batch p-power %dk of 3x3, p=2.5" % (batch.shape[0] // 1000), lambda k: float(k.schatten_ppower_batch(batch, 2.5).sum())),
    ]
    if not quick:
        tasks.insert(1, ("sign patterns 4x5 (2^20), p=4", lambda k: k.sign_enum_ppower_sum(a45, 4.0)))
    return tasks


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled extension not available; build it with: pip install -e . --no-build-isolation")
        return

    print(f"{'task':45s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, call in build_tasks(args.quick):
        t_py, r_py = _time(lambda: call(_kernels_py), args.repeats)
        t_cy, r_cy = _time(lambda: call(_kernels), args.repeats)
        rel = abs(r_py - r_cy) / max(abs(r_py), 1e-300)
        agree = "" if rel < 1e-9 else f"  !! deviation {rel:.1e}"
        print(f"{name:45s} {t_py:9.3f}s {t_cy:9.3f}s {t_py / t_cy:7.1f}x{agree}")


if __name__ == "__main__":
    main()
