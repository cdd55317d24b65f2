"""Fitted density models: the ISDE product model, forest density estimation
(FDE) and the full-dimensional cross-validated KDE baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .data import Dataset, DataError, Partition, SplitSpec, derive_seed, split
from .gaussian import GaussianBlock
from .kde import DEFAULT_FOLDS, BandwidthGrid, KdeModel, select_bandwidth_cv
from .scoring import SubsetScoreTable, gaussian_score_all_subsets, score_all_subsets
from .solver import SolveResult, solve_best

BlockModel = Union[KdeModel, GaussianBlock]


def _rows(x, d: int) -> np.ndarray:
    X = x.values if isinstance(x, Dataset) else np.atleast_2d(np.asarray(x, dtype=np.float64))
    if X.shape[1] != d:
        raise DataError(f"points have dimension {X.shape[1]}, model expects {d}")
    return X


@dataclass(frozen=True)
class FittedModel:
    """Product of per-block marginal estimators over a partition."""

    partition: Partition
    blocks: tuple[BlockModel, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.partition):
            raise DataError("need exactly one estimator per block")

    @property
    def d(self) -> int:
        return self.partition.d

    def block_logpdfs(self, X) -> np.ndarray:
        X = _rows(X, self.d)
        return np.stack([est.logpdf(np.ascontiguousarray(X[:, list(b)]))
                         for b, est in zip(self.partition.blocks, self.blocks)], axis=1)

    def logpdf(self, X) -> np.ndarray:
        parts = self.block_logpdfs(X)
        out = np.zeros(parts.shape[0])
        for j in range(parts.shape[1]):
            out = out + parts[:, j]
        return out


def fitted_model_log_density(fit: FittedModel, x) -> float:
    return float(fit.logpdf(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def assemble_isde(table: SubsetScoreTable, W: Dataset, partition: Partition) -> FittedModel:
    """Marginal estimators on W for each block, with the table's bandwidths."""
    ests = []
    for b in partition.blocks:
        Xb = W.values[:, list(b)]
        if table.estimator == "gaussian":
            ests.append(GaussianBlock.fit(Xb, label=b))
        else:
            ests.append(KdeModel(Xb, table.bandwidth(b)))
    return FittedModel(partition, tuple(ests))


@dataclass
class IsdeFit:
    model: FittedModel
    table: SubsetScoreTable
    solve: SolveResult


def fit_isde(ds: Dataset, k: int, split_spec: SplitSpec, grid: BandwidthGrid | None = None,
             folds: int = DEFAULT_FOLDS, estimator: str = "kde", workers: int = 1,
             table: SubsetScoreTable | None = None) -> IsdeFit:
    """Score all blocks on the W/Z split, pick the best partition, keep its marginals."""
    if table is None:
        if estimator == "gaussian":
            table = gaussian_score_all_subsets(ds, k, split_spec)
        else:
            table = score_all_subsets(ds, k, split_spec, grid, folds, workers=workers)
    res = solve_best(table)
    W, _ = split(ds, split_spec)
    return IsdeFit(assemble_isde(table, W, res.partition), table, res)


def fit_cvkde(ds: Dataset, grid: BandwidthGrid | None = None, folds: int = DEFAULT_FOLDS,
              seed: int = 0) -> KdeModel:
    """Full-dimensional KDE on every row, bandwidth chosen by V-fold CV."""
    h, _ = select_bandwidth_cv(ds.values, grid or BandwidthGrid(), folds, seed)
    return KdeModel(ds.values, h)


@dataclass(frozen=True)
class Forest:
    d: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        uf = _UnionFind(self.d)
        for a, b in edges:
            if not (0 <= a < self.d and 0 <= b < self.d) or a == b:
                raise DataError(f"bad edge {(a, b)} for d={self.d}")
            if not uf.union(a, b):
                raise DataError(f"edge {(a, b)} closes a cycle")
        object.__setattr__(self, "edges", edges)

    def components(self) -> Partition:
        uf = _UnionFind(self.d)
        for a, b in self.edges:
            uf.union(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(self.d):
            groups.setdefault(uf.find(i), []).append(i)
        return Partition(tuple(tuple(g) for g in groups.values()))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def edge_weights(table: SubsetScoreTable) -> dict[tuple[int, int], float]:
    """Held-out gain of modelling each pair jointly rather than independently."""
    d = table.d
    return {(i, j): table.score((i, j)) - table.score((i,)) - table.score((j,))
            for i in range(d) for j in range(i + 1, d)}


def select_forest(weights: dict[tuple[int, int], float], d: int) -> Forest:
    """Kruskal on decreasing weight, skipping cycles, stopping at weight <= 0."""
    uf = _UnionFind(d)
    edges = []
    for (i, j), w in sorted(weights.items(), key=lambda kv: (-kv[1], kv[0])):
        if w <= 0:
            break
        if uf.union(i, j):
            edges.append((i, j))
    return Forest(d, tuple(edges))


@dataclass(frozen=True)
class ForestModel:
    forest: Forest
    univariate: tuple[KdeModel, ...]
    bivariate: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [e for e in self.forest.edges if e not in self.bivariate]
        if missing or len(self.univariate) != self.forest.d:
            raise DataError(f"forest model is missing estimators (edges {missing})")

    def logpdf(self, X) -> np.ndarray:
        X = _rows(X, self.forest.d)
        uni = [m.logpdf(np.ascontiguousarray(X[:, [i]])) for i, m in enumerate(self.univariate)]
        out = np.zeros(X.shape[0])
        for i, j in self.forest.edges:
            pair = self.bivariate[(i, j)].logpdf(np.ascontiguousarray(X[:, [i, j]]))
            out = out + (pair - uni[i] - uni[j])
        for u in uni:
            out = out + u
        return out


def fit_fde(table: SubsetScoreTable, W: Dataset) -> ForestModel:
    """Forest density estimate from the pairwise entries of a KDE score table.

    Marginals are KDEs on W with the bandwidths stored in the table.
    """
    if table.k < 2 and table.d > 1:
        raise DataError("FDE needs all subsets of size <= 2 in the score table")
    d = table.d
    forest = select_forest(edge_weights(table), d) if d > 1 else Forest(d, ())
    uni = tuple(KdeModel(W.values[:, [i]], table.bandwidth((i,))) for i in range(d))
    biv = {e: KdeModel(W.values[:, list(e)], table.bandwidth(e)) for e in forest.edges}
    return ForestModel(forest, uni, biv)


def forest_log_density(model: ForestModel, x) -> float:
    return float(model.logpdf(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def validation_score(log_density_fn: Callable[[np.ndarray], np.ndarray], X_valid) -> float:
    """Mean log-density over validation rows. ``log_density_fn`` maps an
    (M, d) array to M log-densities (e.g. ``model.logpdf``)."""
    X = X_valid.values if isinstance(X_valid, Dataset) else np.atleast_2d(np.asarray(X_valid, dtype=float))
    if X.shape[0] < 1:
        raise DataError("empty validation set")
    return float(np.mean(log_density_fn(X)))


def cvkde_seed(seed: int) -> int:
    return derive_seed(seed, "cvkde")
