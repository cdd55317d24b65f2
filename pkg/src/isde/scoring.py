"""Held-out scores of every candidate block, and partition scores built from them.

Scoring is the expensive phase: one bandwidth selection and one held-out
evaluation per subset. Partition scores are then plain sums of table entries,
so nothing is refitted when partitions are compared.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import count_subsets, enumerate_subsets
from .data import (Dataset, FeatureSubset, Partition, SplitSpec, as_subset, derive_seed,
                   parse_subset_key, split, subset_key)
from .gaussian import GaussianBlock
from .kde import DEFAULT_FOLDS, BandwidthGrid, log_density_grid, make_grid, select_bandwidth_cv

SCHEMA_VERSION = 1


class ScoringError(RuntimeError):
    pass


class MissingBlock(KeyError):
    pass


@dataclass
class SubsetScoreTable:
    d: int
    k: int
    split: SplitSpec
    entries: dict[FeatureSubset, tuple[float, float]] = field(default_factory=dict)
    estimator: str = "kde"
    meta: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return len(self.entries) == count_subsets(self.d, self.k) and all(
            len(s) <= self.k for s in self.entries)

    def score(self, s: Sequence[int]) -> float:
        try:
            return self.entries[tuple(s)][1]
        except KeyError:
            raise MissingBlock(f"block {tuple(s)} not in score table") from None

    def bandwidth(self, s: Sequence[int]) -> float:
        return self.entries[tuple(s)][0]

    def negated(self) -> "SubsetScoreTable":
        return SubsetScoreTable(self.d, self.k, self.split,
                                {s: (h, -v) for s, (h, v) in self.entries.items()},
                                self.estimator, dict(self.meta))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "estimator": self.estimator,
            "d": self.d,
            "k": self.k,
            "complete": self.complete,
            "split": self.split.to_dict(),
            "meta": self.meta,
            "entries": [
                {"subset": list(s), "key": subset_key(s),
                 "bandwidth": None if math.isnan(h) else h, "score": v}
                for s, (h, v) in sorted(self.entries.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SubsetScoreTable":
        entries = {}
        for e in obj["entries"]:
            s = tuple(e["subset"]) if "subset" in e else parse_subset_key(e["key"])
            h = e.get("bandwidth")
            entries[as_subset(s, obj["d"])] = (float("nan") if h is None else float(h), float(e["score"]))
        return cls(int(obj["d"]), int(obj["k"]), SplitSpec.from_dict(obj["split"]), entries,
                   obj.get("estimator", "kde"), obj.get("meta", {}))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SubsetScoreTable":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def partition_score(table: SubsetScoreTable, partition: Partition | Iterable[Sequence[int]]) -> float:
    """Sum of block scores, accumulated in canonical block order from 0.0."""
    blocks = partition.blocks if isinstance(partition, Partition) else Partition(tuple(partition)).blocks
    total = 0.0
    for b in blocks:
        total = total + table.score(b)
    return total


def kde_subset_score(W: np.ndarray, Z: np.ndarray, s: FeatureSubset, hs: Sequence[float],
                     folds: int, cv_seed: int) -> tuple[float, float]:
    """(selected bandwidth, held-out mean log-density) for one block."""
    cols = list(s)
    Ws = np.ascontiguousarray(W[:, cols])
    Zs = np.ascontiguousarray(Z[:, cols])
    h, _ = select_bandwidth_cv(Ws, hs, folds, cv_seed)
    return h, float(np.mean(log_density_grid(Ws, Zs, [h])[:, 0]))


_WORKER: dict = {}


def _init_worker(W, Z, hs, folds, cv_seed):
    _WORKER.update(W=W, Z=Z, hs=hs, folds=folds, cv_seed=cv_seed)


def _worker_score(s):
    w = _WORKER
    return kde_subset_score(w["W"], w["Z"], s, w["hs"], w["folds"], w["cv_seed"])


def score_all_subsets(ds: Dataset, k: int, split_spec: SplitSpec,
                      grid: BandwidthGrid | None = None, folds: int = DEFAULT_FOLDS,
                      workers: int = 1, existing: SubsetScoreTable | None = None,
                      progress=None) -> SubsetScoreTable:
    """Select a CV bandwidth on W and score on Z for every subset of size <= k.

    CV folds use ``derive_seed(split.seed, "cv")`` and are identical for all
    subsets. Entries already present in ``existing`` (same split and grid)
    are reused, so a table can be extended to a larger k.
    """
    grid = grid or BandwidthGrid()
    d = ds.n_features
    if not 1 <= k <= d:
        raise ScoringError(f"need 1 <= k <= d, got k={k}, d={d}")
    W, Z = split(ds, split_spec)
    hs = make_grid(grid)
    cv_seed = derive_seed(split_spec.seed, "cv")
    meta = {"grid": {"min": grid.min, "max": grid.max, "count": grid.count, "scale": grid.scale},
            "folds": folds, "cv_seed": cv_seed}
    entries: dict[FeatureSubset, tuple[float, float]] = {}
    if existing is not None:
        if existing.split != split_spec or existing.d != d or existing.meta.get("grid") != meta["grid"]:
            raise ScoringError("existing table was built with a different split, dimension or grid")
        entries.update({s: v for s, v in existing.entries.items() if len(s) <= k})
    todo = [s for s in enumerate_subsets(d, k) if s not in entries]

    def record(s, res):
        h, v = res
        if not math.isfinite(v):
            raise ScoringError(f"non-finite score for subset {s}")
        entries[s] = (h, v)
        if progress is not None:
            progress(len(entries))

    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(W.values, Z.values, hs, folds, cv_seed)) as pool:
            for s, res in zip(todo, pool.map(_worker_score, todo, chunksize=4)):
                record(s, res)
    else:
        for s in todo:
            try:
                res = kde_subset_score(W.values, Z.values, s, hs, folds, cv_seed)
            except Exception as exc:
                raise ScoringError(f"scoring failed for subset {s}: {exc}") from exc
            record(s, res)
    ordered = {s: entries[s] for s in enumerate_subsets(d, k)}
    return SubsetScoreTable(d, k, split_spec, ordered, "kde", meta)


def gaussian_score_all_subsets(ds: Dataset, k: int, split_spec: SplitSpec) -> SubsetScoreTable:
    """Like :func:`score_all_subsets` with a zero-mean Gaussian marginal whose
    covariance is the second-moment matrix of W restricted to S. Bandwidths
    are stored as NaN (JSON null)."""
    d = ds.n_features
    if not 1 <= k <= d:
        raise ScoringError(f"need 1 <= k <= d, got k={k}, d={d}")
    W, Z = split(ds, split_spec)
    entries = {}
    for s in enumerate_subsets(d, k):
        cols = list(s)
        block = GaussianBlock.fit(W.values[:, cols], label=s)
        entries[s] = (float("nan"), float(np.mean(block.logpdf(Z.values[:, cols]))))
    return SubsetScoreTable(d, k, split_spec, entries, "gaussian", {})
