"""Command-line entry point.

Every command writes UTF-8 JSON carrying ``schema_version``, the resolved
``config`` and a ``timings`` section; everything except ``timings`` is a
deterministic function of the inputs and the config.

Exit codes: 0 success, 1 computation error, 2 usage or I/O error.

Seeds: one top-level ``--seed``; the W/Z split uses ``derive_seed(seed, "split")``,
CV folds ``derive_seed(split_seed, "cv")``, the CVKDE baseline
``derive_seed(seed, "cvkde")``.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import _backend
from .baselines import Forest, ForestModel, FittedModel, fit_cvkde, fit_fde, validation_score
from .combinatorics import ENUMERATION_GUARD, count_pair_partitions, count_partitions, count_subsets
from .data import (Dataset, DataError, Partition, SplitSpec, apply_scaling, derive_seed, load_csv,
                   split, unit_scaling)
from .gaussian import GaussianBlock, run_gaussian_experiment
from .kde import DEFAULT_FOLDS, DEFAULT_GRID_COUNT, DEFAULT_GRID_MAX, DEFAULT_GRID_MIN, BandwidthGrid, KdeModel
from .partition_space import edit_distance, random_partition, random_walk
from .scoring import (SCHEMA_VERSION, SubsetScoreTable, gaussian_score_all_subsets, partition_score,
                      score_all_subsets)
from .solver import exhaustive_scores, solve_best, solve_bruteforce, solve_kbest, solve_worst
from .synth import METHODS, run_synthetic_benchmark

MANIFEST_KIND = "isde-model-manifest"


class UsageError(Exception):
    """Bad arguments or inputs; exit code 2."""


# ---------------------------------------------------------------- helpers

def _env_workers() -> int:
    raw = os.environ.get("ISDE_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"ISDE_WORKERS must be an integer, got {raw!r}") from None
    return max(1, n)


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("structure sizes must be positive")
    return sizes


def _grid(args) -> BandwidthGrid:
    try:
        return BandwidthGrid(args.grid_min, args.grid_max, args.grid_count, args.grid_scale)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=1, allow_nan=False) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _report(command: str, args, result: dict, timings: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "config": _config(args),
            "result": result, "timings": timings}


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_table(path: str) -> SubsetScoreTable:
    obj = _read_json(path)
    try:
        return SubsetScoreTable.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a score table: {exc}") from None


def _load_training(path: str, header: bool, rescale: bool):
    """Training data plus the (lo, span) used to rescale it, or None."""
    ds = load_csv(path, header)
    if not rescale:
        return ds, None
    lo, span = unit_scaling(ds.values)
    return Dataset(apply_scaling(ds.values, lo, span), ds.feature_names), {
        "lo": [float(x) for x in lo], "span": [float(x) for x in span]}


def _apply_rescale(ds: Dataset, rescale: dict | None) -> Dataset:
    if rescale is None:
        return ds
    if len(rescale["lo"]) != ds.n_features:
        raise UsageError(f"rescaling covers {len(rescale['lo'])} features, data has {ds.n_features}")
    return Dataset(apply_scaling(ds.values, rescale["lo"], rescale["span"]), ds.feature_names)


def _split_spec(args, n_rows: int) -> SplitSpec:
    m = args.m if args.m is not None else n_rows // 2
    n = args.n if args.n is not None else n_rows - m
    if m < 1 or n < 1 or m + n > n_rows:
        raise UsageError(f"split m={m}, n={n} does not fit {n_rows} rows")
    return SplitSpec(m, n, derive_seed(args.seed, "split"))


def _check_k(k: int, d: int) -> None:
    if not 1 <= k <= d:
        raise UsageError(f"need 1 <= k <= d, got k={k}, d={d}")


def _grid_json(grid: BandwidthGrid) -> dict:
    return {"min": grid.min, "max": grid.max, "count": grid.count, "scale": grid.scale}


# ---------------------------------------------------------------- manifests

def build_model(manifest: dict, train: Dataset):
    """Rebuild the fitted density from a manifest and its (unscaled) training data."""
    if manifest.get("kind") != MANIFEST_KIND:
        raise UsageError("not a model manifest")
    d = int(manifest["d"])
    if train.n_features != d:
        raise UsageError(f"manifest has d={d}, training data has {train.n_features} columns")
    train = _apply_rescale(train, manifest.get("rescale"))
    method = manifest["method"]
    if method == "cvkde":
        return KdeModel(train.values, manifest["bandwidth"])
    W, _ = split(train, SplitSpec.from_dict(manifest["split"]))
    if method == "fde":
        forest = Forest(d, tuple(tuple(e) for e in manifest["forest"]["edges"]))
        uni = tuple(KdeModel(W.values[:, [i]], h) for i, h in enumerate(manifest["univariate_bandwidths"]))
        biv = {tuple(e["edge"]): KdeModel(W.values[:, list(e["edge"])], e["bandwidth"])
               for e in manifest["forest"]["bandwidths"]}
        return ForestModel(forest, uni, biv)
    part = Partition(tuple(tuple(b) for b in manifest["partition"]))
    if method == "isde-gauss":
        ests = tuple(GaussianBlock.fit(W.values[:, list(b)], label=b) for b in part.blocks)
    else:
        ests = tuple(KdeModel(W.values[:, list(b)], h) for b, h in zip(part.blocks, manifest["bandwidths"]))
    return FittedModel(part, ests)


def _manifest_base(args, d: int, rescale: dict | None) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": MANIFEST_KIND, "method": args.method, "d": d,
            "train_csv": str(args.csv), "header": bool(args.header), "rescale": rescale,
            "seed": args.seed}


def fit_manifest(args, ds: Dataset, rescale: dict | None, table: SubsetScoreTable | None,
                 workers: int) -> tuple[dict, dict]:
    d = ds.n_features
    grid = _grid(args)
    man = _manifest_base(args, d, rescale)
    timings: dict = {}
    if args.method == "cvkde":
        seed = derive_seed(args.seed, "cvkde")
        t0 = time.perf_counter()
        model = fit_cvkde(ds, grid, args.folds, seed)
        timings["cv"] = time.perf_counter() - t0
        man.update(bandwidth=model.bandwidth, grid=_grid_json(grid), folds=args.folds,
                   seeds={"cv": seed})
        return man, timings
    k = d if args.k is None else args.k
    if args.method == "fde":
        k = max(k, min(2, d))
    _check_k(k, d)
    spec = table.split if table is not None else _split_spec(args, ds.n_rows)
    t0 = time.perf_counter()
    if table is None:
        if args.method == "isde-gauss":
            table = gaussian_score_all_subsets(ds, k, spec)
        else:
            table = score_all_subsets(ds, k, spec, grid, args.folds, workers=workers)
    timings["score_table"] = time.perf_counter() - t0
    man.update(k=table.k, split=spec.to_dict(),
               seeds={"split": spec.seed, "cv": derive_seed(spec.seed, "cv")})
    if args.method != "isde-gauss":
        man.update(grid=table.meta.get("grid", _grid_json(grid)), folds=table.meta.get("folds", args.folds))
    W, _ = split(ds, spec)
    t0 = time.perf_counter()
    if args.method == "fde":
        fm = fit_fde(table, W)
        man["forest"] = {"edges": [list(e) for e in fm.forest.edges],
                         "bandwidths": [{"edge": list(e), "bandwidth": table.bandwidth(e)}
                                        for e in fm.forest.edges]}
        man["univariate_bandwidths"] = [table.bandwidth((i,)) for i in range(d)]
        man["components"] = fm.forest.components().to_list()
        man["note"] = "FDE marginals are fitted on the estimation half W"
    else:
        res = solve_best(table)
        man["partition"] = res.partition.to_list()
        man["objective"] = res.objective
        if args.method == "isde":
            man["bandwidths"] = [table.bandwidth(b) for b in res.partition.blocks]
    timings["solve"] = time.perf_counter() - t0
    return man, timings


# ---------------------------------------------------------------- commands

def cmd_count(args) -> int:
    t0 = time.perf_counter()
    if not 1 <= args.k <= args.d:
        raise UsageError(f"need 1 <= k <= d, got d={args.d}, k={args.k}")
    res = {"d": args.d, "k": args.k, "subsets": count_subsets(args.d, args.k),
           "partitions": count_partitions(args.d, args.k),
           "pair_partitions": count_pair_partitions(args.d)}
    _emit(_report("count", args, res, {"total": time.perf_counter() - t0}), args.out)
    return 0


def cmd_score(args) -> int:
    t0 = time.perf_counter()
    ds, rescale = _load_training(args.csv, args.header, args.rescale)
    k = ds.n_features if args.k is None else args.k
    _check_k(k, ds.n_features)
    spec = _split_spec(args, ds.n_rows)
    grid = _grid(args)
    workers = args.workers or _env_workers()
    if args.estimator == "gaussian":
        table = gaussian_score_all_subsets(ds, k, spec)
    else:
        table = score_all_subsets(ds, k, spec, grid, args.folds, workers=workers)
    table.meta["rescale"] = rescale
    table.meta["train_csv"] = str(args.csv)
    elapsed = time.perf_counter() - t0
    obj = table.to_json()
    obj["config"] = _config(args)
    obj["timings"] = {"total": elapsed}
    _emit(obj, args.out)
    print(f"scored {len(table.entries)} subsets in {elapsed:.2f} s", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    table = _load_table(args.table)
    t0 = time.perf_counter()
    if args.brute_force:
        results = [solve_bruteforce(table, args.guard)]
    elif args.worst:
        results = solve_worst(table, args.worst)
    elif args.k_best:
        results = solve_kbest(table, args.k_best)
    else:
        results = [solve_best(table)]
    dt = time.perf_counter() - t0
    rows = [{"rank": i + 1, "partition": r.partition.to_list(), "objective": r.objective,
             "status": r.status, "nodes_explored": r.nodes_explored} for i, r in enumerate(results)]
    res = {"d": table.d, "k": table.k, "mode": ("brute-force" if args.brute_force else
                                                 "worst" if args.worst else
                                                 "k-best" if args.k_best else "best"),
           "backend": _backend.BACKEND, "solutions": rows}
    _emit(_report("solve", args, res, {"solve": dt}), args.out)
    return 0


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    ds, rescale = _load_training(args.csv, args.header, args.rescale)
    table = None
    if args.table:
        if args.method == "cvkde":
            raise UsageError("--table does not apply to the cvkde method")
        table = _load_table(args.table)
        if table.d != ds.n_features:
            raise UsageError(f"score table has d={table.d}, CSV has {ds.n_features} columns")
        want = "gaussian" if args.method == "isde-gauss" else "kde"
        if table.estimator != want:
            raise UsageError(f"method {args.method} needs a {want} score table, got {table.estimator}")
        if bool(table.meta.get("rescale")) != bool(rescale):
            raise UsageError("--rescale must match the setting used to build the score table")
    man, timings = fit_manifest(args, ds, rescale, table, args.workers or _env_workers())
    man["config"] = _config(args)
    timings["total"] = time.perf_counter() - t0
    man["timings"] = timings
    _emit(man, args.out)
    return 0


def _resamples(n_rows: int, count: int, size: int, seed: int) -> list[np.ndarray]:
    if size > n_rows:
        raise UsageError(f"resample size {size} exceeds the {n_rows} validation rows")
    rng = np.random.default_rng(derive_seed(seed, "resample"))
    return [np.sort(rng.choice(n_rows, size, replace=False)) for _ in range(count)]


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    man = _read_json(args.manifest)
    if man.get("kind") != MANIFEST_KIND:
        raise UsageError(f"{args.manifest} is not a model manifest")
    header = man.get("header", False) if args.header is None else args.header
    train = load_csv(args.train or man["train_csv"], header)
    valid = load_csv(args.valid, header)
    if valid.n_features != man["d"]:
        raise UsageError(f"manifest has d={man['d']}, validation CSV has {valid.n_features} columns")
    model = build_model(man, train)
    valid = _apply_rescale(valid, man.get("rescale"))
    res = {"method": man["method"], "d": man["d"], "rows": valid.n_rows,
           "score": validation_score(model.logpdf, valid)}
    if args.resamples:
        res["resamples"] = [
            {"rows": int(len(idx)), "score": validation_score(model.logpdf, valid.take_rows(idx))}
            for idx in _resamples(valid.n_rows, args.resamples, args.resample_size, args.seed)]
    _emit(_report("validate", args, res, {"total": time.perf_counter() - t0}), args.out)
    return 0


class _BlockCache:
    """Per-block validation log-densities, so partitions sharing blocks share work.

    Sums blocks in the same order as ``FittedModel.logpdf``, so the values
    equal those of the assembled model.
    """

    def __init__(self, table: SubsetScoreTable, W: Dataset, valid: Dataset):
        self.table, self.W, self.valid = table, W, valid
        self.cache: dict = {}

    def _block(self, b: tuple) -> np.ndarray:
        if b not in self.cache:
            Xb = np.ascontiguousarray(self.W.values[:, list(b)])
            est = (GaussianBlock.fit(Xb, label=b) if self.table.estimator == "gaussian"
                   else KdeModel(Xb, self.table.bandwidth(b)))
            self.cache[b] = est.logpdf(np.ascontiguousarray(self.valid.values[:, list(b)]))
        return self.cache[b]

    def score(self, p: Partition) -> float:
        out = np.zeros(self.valid.n_rows)
        for b in p.blocks:
            out = out + self._block(b)
        return float(np.mean(out))


def cmd_explore(args) -> int:
    t0 = time.perf_counter()
    table = _load_table(args.table)
    timings: dict = {}
    scorer = None
    if args.valid:
        train_path, header, rescale = args.train, bool(args.header), None
        if args.manifest:
            man = _read_json(args.manifest)
            train_path = train_path or man.get("train_csv")
            header = man.get("header", header)
            rescale = man.get("rescale")
        else:
            rescale = table.meta.get("rescale")
            train_path = train_path or table.meta.get("train_csv")
        if not train_path:
            raise UsageError("validation scores need the training CSV (--train or --manifest)")
        train = _apply_rescale(load_csv(train_path, header), rescale)
        valid = _apply_rescale(load_csv(args.valid, header), rescale)
        if train.n_features != table.d or valid.n_features != table.d:
            raise UsageError(f"score table has d={table.d}, CSV widths differ")
        W, _ = split(train, table.split)
        scorer = _BlockCache(table, W, valid)

    t1 = time.perf_counter()
    best = solve_best(table)
    ref = best.partition
    rows = []

    def add(kind, index, p, step=None):
        row = {"kind": kind, "index": index}
        if step is not None:
            row["step"] = step
        row.update(partition=p.to_list(), score=partition_score(table, p),
                   edit_distance=edit_distance(ref, p))
        if scorer is not None:
            row["validation_score"] = scorer.score(p)
        rows.append(row)

    for i, r in enumerate(solve_kbest(table, args.k_best) if args.k_best else []):
        add("best", i, r.partition)
    for i, r in enumerate(solve_worst(table, args.worst) if args.worst else []):
        add("worst", i, r.partition)
    for i in range(args.random):
        add("random", i, random_partition(table.d, table.k, derive_seed(args.seed, "random", i)))
    for w in range(args.walks):
        trace = random_walk(ref, args.length, table.k, derive_seed(args.seed, "walk", w), args.walk_mode)
        for step, p in enumerate(trace.steps):
            add("walk", w, p, step)
    timings["explore"] = time.perf_counter() - t1

    res = {"d": table.d, "k": table.k, "optimum": ref.to_list(), "optimum_score": best.objective,
           "rows": rows}
    if args.exhaustive:
        t1 = time.perf_counter()
        n = count_partitions(table.d, table.k)
        if n > args.guard:
            raise UsageError(f"{n} partitions exceed the enumeration guard {args.guard}")
        scores = exhaustive_scores(table, args.guard)
        ex = {"count": int(scores.size), "min": float(scores.min()), "max": float(scores.max())}
        if args.threshold is not None:
            ex["threshold"] = args.threshold
            ex["above_threshold"] = int(np.count_nonzero(scores > args.threshold))
        if args.scores_out:
            np.savetxt(args.scores_out, scores, fmt="%.17g", header="score", comments="")
            ex["scores_csv"] = str(args.scores_out)
        res["exhaustive"] = ex
        timings["exhaustive"] = time.perf_counter() - t1
    timings["total"] = time.perf_counter() - t0
    _emit(_report("explore", args, res, timings), args.out)
    return 0


def cmd_synth_bench(args) -> int:
    t0 = time.perf_counter()
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise UsageError(f"methods must be a subset of {','.join(METHODS)}")
    d = sum(args.structure)
    if args.k is not None:
        _check_k(args.k, d)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    rep = run_synthetic_benchmark(args.structure, args.n, args.m_valid, methods, args.repeats,
                                  args.seed, args.k, _grid(args), args.folds,
                                  workers=args.workers or _env_workers(), log=log)
    timings = {"total": time.perf_counter() - t0,
               "runs": [run.pop("timings") for run in rep["runs"]]}
    if args.csv_out:
        with open(args.csv_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["repeat", "method", "score"])
            for run in rep["runs"]:
                for meth in methods:
                    w.writerow([run["repeat"], meth, repr(run["scores"][meth])])
    rep.pop("schema_version")
    _emit(_report("synth-bench", args, rep, timings), args.out)
    return 0


def cmd_gauss_exp(args) -> int:
    t0 = time.perf_counter()
    if not 0 < args.sigma < 1:
        raise UsageError("sigma must lie in (0, 1)")
    if args.k is not None:
        _check_k(args.k, sum(args.structure))
    rep = run_gaussian_experiment(args.structure, args.sigma, args.n, args.repeats, args.seed, args.k)
    rep.pop("schema_version")
    _emit(_report("gauss-exp", args, rep, {"total": time.perf_counter() - t0}), args.out)
    return 0


# ---------------------------------------------------------------- parser

def _add_grid(p) -> None:
    g = p.add_argument_group("bandwidth selection")
    g.add_argument("--grid-min", type=float, default=DEFAULT_GRID_MIN)
    g.add_argument("--grid-max", type=float, default=DEFAULT_GRID_MAX)
    g.add_argument("--grid-count", type=int, default=DEFAULT_GRID_COUNT)
    g.add_argument("--grid-scale", choices=("log", "linear"), default="log")
    g.add_argument("--folds", type=int, default=DEFAULT_FOLDS)


def _add_split(p) -> None:
    p.add_argument("--m", type=int, help="estimation rows W (default: half the data)")
    p.add_argument("--n", type=int, help="scoring rows Z (default: the remaining rows)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isde", description="Independence structure density estimation")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("count", help="count bounded subsets and partitions")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("score", help="held-out score of every subset of size <= k")
    p.add_argument("csv")
    p.add_argument("--k", type=int)
    p.add_argument("--header", action="store_true")
    p.add_argument("--rescale", action="store_true", help="map every column onto [0, 1] first")
    p.add_argument("--estimator", choices=("kde", "gaussian"), default="kde")
    p.add_argument("--workers", type=int, help="worker processes (default: $ISDE_WORKERS or 1)")
    _add_split(p)
    _add_grid(p)
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("solve", help="best, K-best or worst partitions of a score table")
    p.add_argument("--table", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k-best", type=int)
    g.add_argument("--worst", type=int)
    g.add_argument("--brute-force", action="store_true")
    p.add_argument("--guard", type=int, default=ENUMERATION_GUARD)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("fit", help="fit a density model and write its manifest")
    p.add_argument("csv")
    p.add_argument("--method", choices=("isde", "fde", "cvkde", "isde-gauss"), default="isde")
    p.add_argument("--k", type=int)
    p.add_argument("--table", help="reuse a score table built by the score command")
    p.add_argument("--header", action="store_true")
    p.add_argument("--rescale", action="store_true")
    p.add_argument("--workers", type=int)
    _add_split(p)
    _add_grid(p)
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="mean validation log-likelihood of a fitted manifest")
    p.add_argument("manifest")
    p.add_argument("valid")
    p.add_argument("--train", help="training CSV (default: the path stored in the manifest)")
    p.add_argument("--header", action="store_true", default=None)
    p.add_argument("--resamples", type=int, default=0, help="also score this many row subsamples")
    p.add_argument("--resample-size", type=int, default=2000)
    common(p)
    p.set_defaults(func=cmd_validate)

    for name in ("explore", "analyze"):
        p = sub.add_parser(name, help="compare best, worst, random and random-walk partitions")
        p.add_argument("--table", required=True)
        p.add_argument("--manifest", help="manifest giving the training CSV and rescaling")
        p.add_argument("--train")
        p.add_argument("--valid", help="validation CSV; adds a validation score to every row")
        p.add_argument("--header", action="store_true")
        p.add_argument("--k-best", type=int, default=3)
        p.add_argument("--worst", type=int, default=3)
        p.add_argument("--random", type=int, default=3)
        p.add_argument("--walks", type=int, default=5)
        p.add_argument("--length", type=int, default=40)
        p.add_argument("--walk-mode", choices=("uniform", "type-first"), default="uniform")
        p.add_argument("--exhaustive", action="store_true", help="score every partition")
        p.add_argument("--threshold", type=float)
        p.add_argument("--scores-out", help="CSV dump of every partition score (with --exhaustive)")
        p.add_argument("--guard", type=int, default=ENUMERATION_GUARD)
        common(p)
        p.set_defaults(func=cmd_explore)

    p = sub.add_parser("synth-bench", help="ISDE, FDE and CVKDE on synthetic structures")
    p.add_argument("--structure", type=_sizes, default=[2, 2, 1])
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--m-valid", type=int, default=5000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--k", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--csv-out")
    p.add_argument("--verbose", action="store_true")
    _add_grid(p)
    common(p)
    p.set_defaults(func=cmd_synth_bench)

    p = sub.add_parser("gauss-exp", help="block-covariance recovery with Gaussian marginals")
    p.add_argument("--structure", type=_sizes, default=[4, 4, 1])
    p.add_argument("--sigma", type=float, default=0.7)
    p.add_argument("--n", type=int, default=6000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--k", type=int)
    common(p)
    p.set_defaults(func=cmd_gauss_exp)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DataError, OSError) as exc:
        print(f"isde: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failures
        print(f"isde: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
