"""Synthetic independence-structure data and the three-method benchmark.

A structure [s_1, ..., s_K] concatenates independent blocks:

* size 1: uniform on [0, 1]
* size 2: noisy points on two concentric circles
* size 3: Y1, Y2 ~ Bernoulli(1/2), Y3 = |Y1 - Y2|, plus N(0, 0.08 I) noise
  (pairwise independent, not mutually independent)
* size >= 4: equal mixture of N(0, I) and N(1, I)

then rescales every column to [0, 1].
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import assemble_isde, fit_cvkde, fit_fde, validation_score
from .data import Dataset, DataError, Partition, SplitSpec, derive_seed, rescale_unit, split
from .gaussian import is_admissible
from .kde import DEFAULT_FOLDS, BandwidthGrid
from .scoring import score_all_subsets
from .solver import solve_best

METHODS = ("isde", "fde", "cvkde")


@dataclass(frozen=True)
class SynthConfig:
    radii: tuple[float, float] = (0.5, 1.0)
    ring_noise: float = 0.05
    xor_variance: float = 0.08
    mixture_weight: float = 0.5
    mixture_scale: float = 1.0


@dataclass(frozen=True)
class StructureSpec:
    sizes: tuple[int, ...]
    seed: int = 0
    n_rows: int = 5000

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or min(sizes) < 1:
            raise DataError(f"structure sizes must be positive, got {self.sizes}")
        if self.n_rows < 1:
            raise DataError("n_rows must be >= 1")
        object.__setattr__(self, "sizes", sizes)

    @property
    def d(self) -> int:
        return sum(self.sizes)


def gen_block(size: int, n_rows: int, seed: int, config: SynthConfig = SynthConfig()) -> Dataset:
    if size < 1:
        raise DataError("block size must be >= 1")
    rng = np.random.default_rng(seed)
    if size == 1:
        x = rng.random((n_rows, 1))
    elif size == 2:
        r = np.where(rng.random(n_rows) < 0.5, config.radii[0], config.radii[1])
        theta = rng.uniform(0.0, 2.0 * np.pi, n_rows)
        x = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        x += rng.normal(0.0, config.ring_noise, (n_rows, 2))
    elif size == 3:
        y1 = rng.integers(0, 2, n_rows)
        y2 = rng.integers(0, 2, n_rows)
        y = np.column_stack([y1, y2, np.abs(y1 - y2)]).astype(float)
        x = y + rng.normal(0.0, np.sqrt(config.xor_variance), (n_rows, 3))
    else:
        shift = (rng.random(n_rows) >= config.mixture_weight).astype(float)
        x = rng.normal(0.0, config.mixture_scale, (n_rows, size)) + shift[:, None]
    return Dataset(x)


def gen_structure(spec: StructureSpec, config: SynthConfig = SynthConfig()) -> tuple[Dataset, Partition]:
    cols = [gen_block(s, spec.n_rows, derive_seed(spec.seed, "block", i), config).values
            for i, s in enumerate(spec.sizes)]
    return rescale_unit(Dataset(np.hstack(cols))), Partition.from_sizes(spec.sizes)


def benchmark_data(sizes: Sequence[int], n_train: int, m_valid: int, seed: int, repeat: int,
                   config: SynthConfig = SynthConfig()) -> tuple[Dataset, Dataset, Partition]:
    """Train and validation sets for one repeat.

    Both come from one generated pool, rescaled jointly, so they stay
    identically distributed.
    """
    spec = StructureSpec(tuple(sizes), derive_seed(seed, "data", repeat), n_train + m_valid)
    pool, truth = gen_structure(spec, config)
    rows = np.arange(pool.n_rows)
    return pool.take_rows(rows[:n_train]), pool.take_rows(rows[n_train:]), truth


def run_synthetic_benchmark(sizes: Sequence[int], n_train: int = 5000, m_valid: int = 5000,
                            methods: Sequence[str] = METHODS, repeats: int = 5, seed: int = 0,
                            k: int | None = None, grid: BandwidthGrid | None = None,
                            folds: int = DEFAULT_FOLDS, config: SynthConfig = SynthConfig(),
                            workers: int = 1, log=None) -> dict:
    """Validation log-likelihood of each method over seeded repeats.

    ISDE uses an m = n = N/2 split; FDE reuses the ISDE score table; CVKDE is
    fitted on all N training rows.
    """
    methods = tuple(methods)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise DataError(f"unknown methods {sorted(unknown)}")
    grid = grid or BandwidthGrid()
    d = sum(sizes)
    k = d if k is None else k
    runs = []
    for r in range(repeats):
        train, valid, truth = benchmark_data(sizes, n_train, m_valid, seed, r, config)
        run: dict = {"repeat": r, "scores": {}, "timings": {}}
        if "isde" in methods or "fde" in methods:
            m = n_train // 2
            spec = SplitSpec(m, n_train - m, derive_seed(seed, "split", r))
            t0 = time.perf_counter()
            table = score_all_subsets(train, k if "isde" in methods else min(2, d), spec, grid,
                                      folds, workers=workers)
            run["timings"]["score_table"] = time.perf_counter() - t0
            W, _ = split(train, spec)
            if "isde" in methods:
                best = solve_best(table)
                model = assemble_isde(table, W, best.partition)
                run["scores"]["isde"] = validation_score(model.logpdf, valid)
                run["isde"] = {
                    "partition": best.partition.to_list(),
                    "bandwidths": [table.bandwidth(b) for b in best.partition.blocks],
                    "split": spec.to_dict(),
                    "exact": best.partition == truth,
                    "admissible": is_admissible(truth, best.partition),
                }
            if "fde" in methods:
                fm = fit_fde(table, W)
                run["scores"]["fde"] = validation_score(fm.logpdf, valid)
                run["fde"] = {"edges": [list(e) for e in fm.forest.edges]}
        if "cvkde" in methods:
            t0 = time.perf_counter()
            cv = fit_cvkde(train, grid, folds, derive_seed(seed, "cvkde", r))
            run["scores"]["cvkde"] = validation_score(cv.logpdf, valid)
            run["cvkde"] = {"bandwidth": cv.bandwidth}
            run["timings"]["cvkde"] = time.perf_counter() - t0
        runs.append(run)
        if log is not None:
            log(f"repeat {r}: " + ", ".join(f"{k_}={v:.3f}" for k_, v in run["scores"].items()))

    summary = {}
    for meth in methods:
        v = np.array([run["scores"][meth] for run in runs])
        summary[meth] = {"mean": float(v.mean()), "sd": float(v.std(ddof=1)) if len(v) > 1 else 0.0,
                         "scores": [float(x) for x in v]}
    report = {
        "schema_version": 1,
        "structure": list(sizes),
        "n_train": n_train,
        "m_valid": m_valid,
        "k": k,
        "repeats": repeats,
        "seed": seed,
        "grid": {"min": grid.min, "max": grid.max, "count": grid.count, "scale": grid.scale},
        "folds": folds,
        "generator": {"radii": list(config.radii), "ring_noise": config.ring_noise,
                      "xor_variance": config.xor_variance, "mixture_weight": config.mixture_weight,
                      "mixture_scale": config.mixture_scale},
        "methods": summary,
        "runs": runs,
    }
    if "isde" in methods:
        report["isde_recovery_rate"] = float(np.mean([run["isde"]["exact"] for run in runs]))
        report["isde_admissible_rate"] = float(np.mean([run["isde"]["admissible"] for run in runs]))
    if "fde" in methods:
        report["fde_empty_forest_rate"] = float(np.mean([not run["fde"]["edges"] for run in runs]))
    return report
