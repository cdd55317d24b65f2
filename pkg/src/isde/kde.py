"""Spherical Gaussian KDE with log-sum-exp evaluation and CV bandwidth choice."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .data import Dataset

LOG_2PI = float(np.log(2.0 * np.pi))

DEFAULT_GRID_MIN = 0.01
DEFAULT_GRID_MAX = 1.0
DEFAULT_GRID_COUNT = 30
DEFAULT_FOLDS = 5


class KdeError(ValueError):
    pass


@dataclass(frozen=True)
class BandwidthGrid:
    min: float = DEFAULT_GRID_MIN
    max: float = DEFAULT_GRID_MAX
    count: int = DEFAULT_GRID_COUNT
    scale: str = "log"

    def __post_init__(self):
        if not (0 < self.min <= self.max):
            raise KdeError(f"need 0 < min <= max, got {self.min}, {self.max}")
        if self.count < 1:
            raise KdeError("grid count must be >= 1")
        if self.scale not in ("log", "linear"):
            raise KdeError(f"unknown grid scale {self.scale!r}")


def make_grid(grid: BandwidthGrid) -> list[float]:
    if grid.count == 1:
        return [float(grid.min)]
    if grid.scale == "log":
        vals = np.geomspace(grid.min, grid.max, grid.count)
    else:
        vals = np.linspace(grid.min, grid.max, grid.count)
    vals[0], vals[-1] = grid.min, grid.max
    return [float(v) for v in vals]


def _points(x) -> np.ndarray:
    if isinstance(x, Dataset):
        return x.values
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    return np.ascontiguousarray(a)


def log_density_grid(train, queries, bandwidths: Sequence[float]) -> np.ndarray:
    """Log-density of the KDE on ``train`` at every query, for every bandwidth.

    Returns an array of shape (n_queries, n_bandwidths).
    """
    X = _points(train)
    Q = _points(queries)
    if Q.shape[1] != X.shape[1]:
        raise KdeError(f"query dimension {Q.shape[1]} != model dimension {X.shape[1]}")
    if not np.all(np.isfinite(Q)):
        raise KdeError("non-finite query point")
    h = np.asarray(bandwidths, dtype=np.float64)
    if np.any(h <= 0):
        raise KdeError("bandwidths must be positive")
    m, p = X.shape
    sums = _backend.kde_kernels.log_kernel_sums(X, Q, 1.0 / (2.0 * h * h))
    return sums - np.log(m) - 0.5 * p * LOG_2PI - p * np.log(h)


@dataclass(frozen=True)
class KdeModel:
    train_points: np.ndarray
    bandwidth: float

    def __post_init__(self):
        X = _points(self.train_points).copy()
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise KdeError("KDE needs at least one training point")
        if not self.bandwidth > 0:
            raise KdeError(f"bandwidth must be positive, got {self.bandwidth}")
        X.setflags(write=False)
        object.__setattr__(self, "train_points", X)
        object.__setattr__(self, "bandwidth", float(self.bandwidth))

    @property
    def dim(self) -> int:
        return self.train_points.shape[1]

    def logpdf(self, X) -> np.ndarray:
        """Log-density at each row of X."""
        return log_density_grid(self.train_points, X, [self.bandwidth])[:, 0]


def log_density(model: KdeModel, x) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.dim:
        raise KdeError(f"point has dimension {x.shape[0]}, model has {model.dim}")
    return float(model.logpdf(x[None, :])[0])


def mean_log_density(model: KdeModel, eval_points) -> float:
    Q = _points(eval_points)
    if Q.shape[0] < 1:
        raise KdeError("need at least one evaluation point")
    return float(np.mean(model.logpdf(Q)))


def cv_folds(n_rows: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle of row indices cut into ``folds`` near-equal chunks."""
    perm = np.random.default_rng(seed).permutation(n_rows)
    return np.array_split(perm, folds)


def select_bandwidth_cv(train, grid: BandwidthGrid | Sequence[float], folds: int = DEFAULT_FOLDS,
                        seed: int = 0) -> tuple[float, list[float]]:
    """V-fold cross-validated bandwidth maximizing held-out mean log-density.

    ``cv_score[h]`` is the mean over folds of the held-fold mean log-density
    of the KDE fitted on the other folds. Ties go to the largest bandwidth.
    """
    X = _points(train)
    hs = make_grid(grid) if isinstance(grid, BandwidthGrid) else [float(h) for h in grid]
    if not hs:
        raise KdeError("empty bandwidth grid")
    if folds < 2:
        raise KdeError("need at least 2 folds")
    if X.shape[0] < folds:
        raise KdeError(f"{X.shape[0]} rows cannot be split into {folds} folds")
    parts = cv_folds(X.shape[0], folds, seed)
    per_fold = np.empty((folds, len(hs)))
    for v, held in enumerate(parts):
        rest = np.concatenate([parts[u] for u in range(folds) if u != v])
        per_fold[v] = log_density_grid(X[rest], X[held], hs).mean(axis=0)
    scores = per_fold.mean(axis=0)
    best = scores.max()
    h_best = max(h for h, s in zip(hs, scores) if s == best)
    return h_best, [float(s) for s in scores]
