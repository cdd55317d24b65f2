"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_backends.py [--repeat 3]

Prints one line per kernel with the best wall time of each backend and the
speedup, and checks that both backends agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from isde import _pykernels
from isde.combinatorics import enumerate_subsets
from isde.data import SplitSpec
from isde.kde import BandwidthGrid, make_grid
from isde.scoring import SubsetScoreTable
from isde.solver import Candidates

try:
    from isde import _kde_core, _solver_core
except ImportError:  # extensions not built
    _kde_core = _solver_core = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def random_table(d: int, k: int, seed: int) -> SubsetScoreTable:
    rng = np.random.default_rng(seed)
    entries = {s: (0.1, float(rng.normal())) for s in enumerate_subsets(d, k)}
    return SubsetScoreTable(d, k, SplitSpec(1, 1, 0), entries)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kde_core is None:
        print("compiled extensions are not available; nothing to compare")
        return

    rng = np.random.default_rng(0)
    train, queries = rng.random((2000, 3)), rng.random((500, 3))
    inv = 1.0 / (2.0 * np.asarray(make_grid(BandwidthGrid())) ** 2)
    a = _kde_core.log_kernel_sums(train, queries, inv)
    b = _pykernels.log_kernel_sums(train, queries, inv)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    tc = best_of(lambda: _kde_core.log_kernel_sums(train, queries, inv), args.repeat)
    tp = best_of(lambda: _pykernels.log_kernel_sums(train, queries, inv), args.repeat)
    print(f"kde log_kernel_sums 500x2000x30   compiled {tc:8.4f}s  python {tp:8.4f}s  x{tp / tc:6.1f}")

    for d, k in ((12, 12), (10, 4)):
        c = Candidates(random_table(d, k, 1))
        mc, _ = _solver_core.best_completion(c.d, c.masks, c.scores, c.offsets)
        mp, _ = _pykernels.best_completion(c.d, c.masks, c.scores, c.offsets)
        assert mc[-1] == mp[-1]
        tc = best_of(lambda: _solver_core.best_completion(c.d, c.masks, c.scores, c.offsets), args.repeat)
        tp = best_of(lambda: _pykernels.best_completion(c.d, c.masks, c.scores, c.offsets), args.repeat)
        print(f"dp best_completion d={d:<2} k={k:<2}      compiled {tc:8.4f}s  python {tp:8.4f}s  x{tp / tc:6.1f}")

    c = Candidates(random_table(10, 10, 2))
    vc = _solver_core.exhaustive(c.d, c.masks, c.scores, c.offsets)
    vp = _pykernels.exhaustive(c.d, c.masks, c.scores, c.offsets)
    assert vc[0] == vp[0] and vc[2] == vp[2]
    tc = best_of(lambda: _solver_core.exhaustive(c.d, c.masks, c.scores, c.offsets), args.repeat)
    tp = best_of(lambda: _pykernels.exhaustive(c.d, c.masks, c.scores, c.offsets), 1)
    print(f"brute force d=10 k=10 ({vc[2]} partitions) compiled {tc:8.4f}s  python {tp:8.4f}s  x{tp / tc:6.1f}")


if __name__ == "__main__":
    main()
