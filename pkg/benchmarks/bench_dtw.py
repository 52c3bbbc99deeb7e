#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times table fill + backtrack over a corpus-scale synthetic workload
(898 videos x 5 candidates, K=5, T~173) plus a long-video stress shape.
Run from the repo root:

    python3 benchmarks/bench_dtw.py
"""

from __future__ import annotations

import time

import numpy as np

from actalign import kernels

ORDER = np.array([0, 1, 2], dtype=np.int64)


def run_workload(table_fn, backtrack_fn, matrices) -> float:
    start = time.perf_counter()
    sink = 0.0
    for aff in matrices:
        D = table_fn(aff)
        K, T = D.shape
        path = backtrack_fn(D, K - 1, T - 1, ORDER)
        sink += D[-1, -1] / path.shape[0]
    elapsed = time.perf_counter() - start
    assert np.isfinite(sink)
    return elapsed


def make_matrices(rng, count, k, t_low, t_high):
    return [
        rng.random((k, int(rng.integers(t_low, t_high))))
        for _ in range(count)
    ]


def main() -> None:
    rng = np.random.default_rng(0)
    workloads = {
        "corpus-scale (4490 x K=5, T~173)": make_matrices(rng, 4490, 5, 120, 226),
        "long videos (200 x K=10, T~900)": make_matrices(rng, 200, 10, 850, 951),
    }

    backends: dict[str, tuple] = {"numpy": (kernels.table_numpy, kernels.backtrack_numpy)}
    try:
        table_nb, backtrack_nb = kernels._build_numba_kernels()
        # compile outside the timed region
        run_workload(table_nb, backtrack_nb, [rng.random((2, 2))])
        backends["numba"] = (table_nb, backtrack_nb)
    except ImportError:
        print("numba not importable; timing the numpy path only")

    print(f"active backend for library calls: {kernels.active_backend()}\n")
    for label, matrices in workloads.items():
        cells = sum(m.size for m in matrices)
        print(f"{label}  ({cells / 1e6:.1f}M cells)")
        timings = {}
        for name, (table_fn, backtrack_fn) in backends.items():
            best = min(run_workload(table_fn, backtrack_fn, matrices) for _ in range(3))
            timings[name] = best
            print(f"  {name:<6} {best * 1000:8.1f} ms   {cells / best / 1e6:8.1f} Mcells/s")
        if len(timings) == 2:
            print(f"  speedup numba vs numpy: {timings['numpy'] / timings['numba']:.1f}x")
        print()


if __name__ == "__main__":
    main()
