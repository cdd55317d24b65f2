import math

import numpy as np
import pytest
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

import isde.kde as kde_mod
import isde.scoring as scoring
from isde.baselines import assemble_isde, validation_score
from isde.data import Dataset, Partition, SplitSpec, derive_seed, split
from isde.kde import BandwidthGrid, cv_folds, make_grid
from isde.scoring import (MissingBlock, ScoringError, SubsetScoreTable, gaussian_score_all_subsets,
                          partition_score, score_all_subsets)
from isde.solver import solve_best, solve_kbest

GRID = BandwidthGrid(0.02, 1.0, 8)


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(0)
    x = rng.random((120, 4))
    x[:, 1] = 0.5 * x[:, 0] + 0.5 * x[:, 1]
    return Dataset(x)


@pytest.fixture(scope="module")
def table(data):
    return score_all_subsets(data, 3, SplitSpec(60, 60, 5), GRID, 5)


def oracle_score(W, Z, s, hs, folds, seed):
    """CV then held-out scoring, written directly with logsumexp."""
    Ws, Zs = W[:, list(s)], Z[:, list(s)]
    p = len(s)

    def mean_logpdf(train, q, h):
        d2 = ((q[:, None, :] - train[None, :, :]) ** 2).sum(-1)
        return np.mean(logsumexp(-d2 / (2 * h * h), axis=1) - math.log(len(train))
                       - 0.5 * p * math.log(2 * math.pi) - p * math.log(h))

    parts = cv_folds(len(Ws), folds, seed)
    cv = []
    for h in hs:
        cv.append(np.mean([mean_logpdf(Ws[np.concatenate([parts[u] for u in range(folds) if u != v])],
                                       Ws[parts[v]], h) for v in range(folds)]))
    best = max(cv)
    h = max(hh for hh, c in zip(hs, cv) if c == best)
    return h, mean_logpdf(Ws, Zs, h)


def test_table_is_complete(table):
    assert table.complete and len(table.entries) == 4 + 6 + 4
    assert all(len(s) <= 3 for s in table.entries)


def test_entries_match_independent_oracle(data, table, backend):
    W, Z = split(data, table.split)
    hs = make_grid(GRID)
    seed = derive_seed(table.split.seed, "cv")
    for s in [(0,), (0, 1), (1, 2, 3)]:
        h, v = oracle_score(W.values, Z.values, s, hs, 5, seed)
        assert table.bandwidth(s) == h
        assert table.score(s) == pytest.approx(v, abs=1e-10)


def test_gaussian_entries_match_quadratic_form(data):
    spec = SplitSpec(60, 60, 5)
    t = gaussian_score_all_subsets(data, 2, spec)
    W, Z = split(data, spec)
    for s in t.entries:
        cov = W.values[:, list(s)].T @ W.values[:, list(s)] / 60
        ref = multivariate_normal(np.zeros(len(s)), cov).logpdf(Z.values[:, list(s)])
        assert t.score(s) == pytest.approx(float(np.mean(ref)), abs=1e-10)
        assert math.isnan(t.bandwidth(s))


def test_partition_score_is_sequential_sum(table):
    p = Partition(((2,), (0, 1), (3,)))
    assert partition_score(table, p) == (0.0 + table.score((0, 1))) + table.score((2,)) + table.score((3,))
    assert partition_score(table, [(3,), (0, 1), (2,)]) == partition_score(table, p)
    with pytest.raises(MissingBlock):
        partition_score(table, Partition(((0, 1, 2, 3),)))


def test_partition_scoring_never_refits(table, monkeypatch):
    calls = []

    def spy(*a, **k):
        calls.append(a)
        raise AssertionError("density refit during partition scoring")

    for mod, name in [(kde_mod, "log_density_grid"), (kde_mod, "select_bandwidth_cv"),
                      (scoring, "kde_subset_score"), (scoring, "log_density_grid"),
                      (scoring, "select_bandwidth_cv")]:
        monkeypatch.setattr(mod, name, spy)
    solve_best(table)
    solve_kbest(table, 5)
    partition_score(table, Partition.singletons(4))
    assert calls == []


def test_extension_reuses_existing_entries(data, table, monkeypatch):
    small = score_all_subsets(data, 1, table.split, GRID, 5)
    calls = []
    real = scoring.kde_subset_score

    def counting(W, Z, s, *a):
        calls.append(s)
        return real(W, Z, s, *a)

    monkeypatch.setattr(scoring, "kde_subset_score", counting)
    big = score_all_subsets(data, 3, table.split, GRID, 5, existing=small)
    assert len(calls) == len(table.entries) - 4
    assert all(len(s) > 1 for s in calls)
    assert big.entries == table.entries
    with pytest.raises(ScoringError):
        score_all_subsets(data, 2, SplitSpec(60, 60, 6), GRID, 5, existing=small)


def test_json_roundtrip(table, tmp_path):
    table.save(tmp_path / "t.json")
    back = SubsetScoreTable.load(tmp_path / "t.json")
    assert back.entries == table.entries and back.split == table.split and back.k == table.k
    obj = table.to_json()
    assert obj["schema_version"] == 1 and obj["complete"]
    assert obj["entries"][0]["key"] == "0"


def test_gaussian_json_uses_null_bandwidth(data):
    t = gaussian_score_all_subsets(data, 1, SplitSpec(60, 60, 1))
    obj = t.to_json()
    assert all(e["bandwidth"] is None for e in obj["entries"])
    back = SubsetScoreTable.from_json(obj)
    assert all(math.isnan(h) for h, _ in back.entries.values())


def test_parallel_scoring_matches_serial(data, table):
    par = score_all_subsets(data, 3, table.split, GRID, 5, workers=2)
    assert par.entries == table.entries


def test_invalid_k(data):
    with pytest.raises(ScoringError):
        score_all_subsets(data, 5, SplitSpec(60, 60, 0), GRID)
    with pytest.raises(ScoringError):
        gaussian_score_all_subsets(data, 0, SplitSpec(60, 60, 0))


def test_scores_over_z_match_fitted_model(data, table):
    W, Z = split(data, table.split)
    p = solve_best(table).partition
    model = assemble_isde(table, W, p)
    assert validation_score(model.logpdf, Z) == pytest.approx(partition_score(table, p), abs=1e-12)


def test_z_is_not_used_for_bandwidths(data, table):
    W, Z = split(data, table.split)
    rows = np.arange(data.n_rows)
    w_rows = [i for i in rows if any((data.values[i] == w).all() for w in W.values)]
    changed = data.values.copy()
    z_rows = [i for i in rows if i not in w_rows]
    changed[z_rows] = np.random.default_rng(9).random((len(z_rows), 4))
    other = score_all_subsets(Dataset(changed), 3, table.split, GRID, 5)
    assert all(other.bandwidth(s) == table.bandwidth(s) for s in table.entries)
