"""Datasets, feature subsets, partitions and deterministic row splitting.

Feature indices are 0-based everywhere in the library. Human-facing reports
convert to 1-based labels with :func:`format_partition`.
"""
from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FeatureSubset = tuple[int, ...]


class DataError(ValueError):
    """Raised for malformed input data (bad CSV, ragged rows, bad indices)."""


def derive_seed(seed: int, *labels: str | int) -> int:
    """Derive an independent 64-bit seed for a named component.

    All randomness in a run flows from one top-level seed. Each consumer
    (split, CV folds, repeat r, ...) gets ``SeedSequence([seed, *hashes])``
    where string labels are hashed with CRC32.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for lab in labels:
        words.append(zlib.crc32(lab.encode()) if isinstance(lab, str) else int(lab))
    state = np.random.SeedSequence(words).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def as_subset(indices: Iterable[int], d: int | None = None) -> FeatureSubset:
    s = tuple(sorted(int(i) for i in indices))
    if not s:
        raise DataError("feature subset must be nonempty")
    if len(set(s)) != len(s):
        raise DataError(f"duplicate feature index in {s}")
    if s[0] < 0 or (d is not None and s[-1] >= d):
        raise DataError(f"feature index out of range in {s} (d={d})")
    return s


def subset_mask(s: Iterable[int]) -> int:
    m = 0
    for i in s:
        m |= 1 << i
    return m


def mask_subset(mask: int) -> FeatureSubset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_key(s: FeatureSubset) -> str:
    return "-".join(str(i) for i in s)


def parse_subset_key(key: str) -> FeatureSubset:
    return tuple(int(t) for t in key.split("-"))


@dataclass(frozen=True)
class Partition:
    """A set partition of ``{0, ..., d-1}`` stored in canonical form.

    Blocks are sorted tuples, ordered by their smallest element, so two
    partitions with the same blocks compare and hash equal.
    """

    blocks: tuple[FeatureSubset, ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(int(i) for i in b)) for b in self.blocks)))
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise DataError("partition blocks must be nonempty")
            for i in b:
                if i in seen:
                    raise DataError(f"feature {i} appears in two blocks")
                seen.add(i)
        if seen != set(range(len(seen))):
            raise DataError(f"blocks do not cover 0..{len(seen) - 1}: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def singletons(cls, d: int) -> "Partition":
        return cls(tuple((i,) for i in range(d)))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        blocks, start = [], 0
        for s in sizes:
            blocks.append(tuple(range(start, start + s)))
            start += s
        return cls(tuple(blocks))

    @property
    def d(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def max_block(self) -> int:
        return max(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __lt__(self, other: "Partition") -> bool:
        return self.blocks < other.blocks

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def format_partition(p: Partition, names: Sequence[str] | None = None) -> str:
    """Human-readable form with 1-based feature labels (or names)."""
    def lab(i):
        return names[i] if names is not None else str(i + 1)
    return " | ".join("{" + ",".join(lab(i) for i in b) + "}" for b in p.blocks)


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DataError(f"dataset must be a nonempty 2-d table, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("dataset contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.feature_names is not None:
            names = tuple(str(n) for n in self.feature_names)
            if len(names) != v.shape[1] or len(set(names)) != len(names):
                raise DataError("feature_names must have length d with distinct entries")
            object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def take_rows(self, rows: np.ndarray) -> "Dataset":
        return Dataset(self.values[rows], self.feature_names)


@dataclass(frozen=True)
class SplitSpec:
    m: int
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DataError(f"split sizes must be positive (m={self.m}, n={self.n})")

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "seed": self.seed}

    @classmethod
    def from_dict(cls, obj: dict) -> "SplitSpec":
        return cls(int(obj["m"]), int(obj["n"]), int(obj["seed"]))


def load_csv(path: str | Path, has_header: bool = False) -> Dataset:
    """Read a comma-separated table of floats.

    Errors name the 1-based data row and column of the offending cell.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    names = None
    if has_header:
        if not rows:
            raise DataError(f"{path}: empty file")
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(names) if names is not None else len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DataError(f"{path}: row {r} has {len(row)} fields, expected {width}")
        for c, cell in enumerate(row, start=1):
            try:
                x = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric value {cell!r} at row {r}, column {c}") from None
            if not np.isfinite(x):
                raise DataError(f"{path}: non-finite value at row {r}, column {c}")
            out[r - 1, c - 1] = x
    return Dataset(out, tuple(names) if names is not None else None)


def write_csv(ds: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if ds.feature_names is not None:
            w.writerow(ds.feature_names)
        for row in ds.values:
            w.writerow([repr(float(x)) for x in row])


def unit_scaling(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column (min, max - min) used by :func:`rescale_unit`."""
    lo = values.min(axis=0)
    return lo, values.max(axis=0) - lo


def apply_scaling(values: np.ndarray, lo: np.ndarray, span: np.ndarray) -> np.ndarray:
    """(x - lo) / span columnwise; zero-span columns map to 0.

    Values outside the fitting range are not clipped.
    """
    lo = np.asarray(lo, dtype=float)
    span = np.asarray(span, dtype=float)
    out = np.zeros(np.shape(values))
    nz = span > 0
    out[:, nz] = (values[:, nz] - lo[nz]) / span[nz]
    return out


def rescale_unit(ds: Dataset) -> Dataset:
    """Map every column affinely onto [0, 1]; constant columns become 0."""
    lo, span = unit_scaling(ds.values)
    return Dataset(apply_scaling(ds.values, lo, span), ds.feature_names)


def split_indices(n_rows: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.m + spec.n > n_rows:
        raise DataError(f"split needs m + n = {spec.m + spec.n} rows, dataset has {n_rows}")
    perm = np.random.default_rng(spec.seed).permutation(n_rows)
    return perm[: spec.m], perm[spec.m : spec.m + spec.n]


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded random split into an estimation sample W and a scoring sample Z.

    Rows are permuted with ``numpy.random.default_rng(seed).permutation``
    (PCG64); the first m permuted rows form W, the next n form Z.
    """
    w_rows, z_rows = split_indices(ds.n_rows, spec)
    return ds.take_rows(w_rows), ds.take_rows(z_rows)


def restrict(ds: Dataset, s: Sequence[int]) -> Dataset:
    idx = list(s)
    if not idx:
        raise DataError("cannot restrict to an empty subset")
    for i in idx:
        if not 0 <= i < ds.n_features:
            raise DataError(f"feature index {i} out of range for d={ds.n_features}")
    names = None if ds.feature_names is None else tuple(ds.feature_names[i] for i in idx)
    return Dataset(ds.values[:, idx], names)
