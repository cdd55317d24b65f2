from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isde.baselines import (FittedModel, Forest, ForestModel, assemble_isde, edge_weights, fit_cvkde,
                            fit_fde, fit_isde, fitted_model_log_density, forest_log_density,
                            select_forest, validation_score)
from isde.data import Dataset, DataError, Partition, SplitSpec, split
from isde.gaussian import is_admissible
from isde.kde import BandwidthGrid, KdeModel, log_density
from isde.synth import benchmark_data

GRID = BandwidthGrid(0.01, 1.0, 12)


@pytest.fixture(scope="module")
def synth():
    train, valid, truth = benchmark_data([2, 2, 1], 600, 300, 1, 0)
    fit = fit_isde(train, 5, SplitSpec(300, 300, 4), GRID)
    return train, valid, truth, fit


def models(rng, d):
    uni = tuple(KdeModel(rng.random((20, 1)), 0.2) for _ in range(d))
    biv = {(i, j): KdeModel(rng.random((20, 2)), 0.3) for i in range(d) for j in range(i + 1, d)}
    return uni, biv


def test_forest_validation():
    Forest(4, ((0, 1), (1, 2)))
    with pytest.raises(DataError):
        Forest(3, ((0, 1), (1, 2), (0, 2)))
    with pytest.raises(DataError):
        Forest(3, ((0, 3),))
    f = Forest(4, ((2, 1), (0, 3)))
    assert f.edges == ((0, 3), (1, 2))
    assert f.components() == Partition(((0, 3), (1, 2)))


def test_empty_forest_is_sum_of_marginals():
    rng = np.random.default_rng(0)
    uni, biv = models(rng, 3)
    x = rng.random(3)
    m = ForestModel(Forest(3, ()), uni, {})
    assert forest_log_density(m, x) == pytest.approx(sum(log_density(u, [x[i]]) for i, u in enumerate(uni)),
                                                     abs=1e-12)


def test_single_edge_cancels_to_joint():
    rng = np.random.default_rng(1)
    uni, biv = models(rng, 2)
    x = rng.random(2)
    m = ForestModel(Forest(2, ((0, 1),)), uni, biv)
    assert forest_log_density(m, x) == pytest.approx(log_density(biv[(0, 1)], x), abs=1e-12)


def test_forest_density_term_by_term():
    rng = np.random.default_rng(2)
    uni, biv = models(rng, 5)
    for seed in range(5):
        r = np.random.default_rng(seed)
        edges = []
        forest_uf = list(range(5))

        def find(a):
            while forest_uf[a] != a:
                a = forest_uf[a]
            return a

        for i, j in r.permutation(list(combinations(range(5), 2))):
            if find(i) != find(j) and r.random() < 0.6:
                forest_uf[find(i)] = find(j)
                edges.append((int(i), int(j)))
        m = ForestModel(Forest(5, tuple(edges)), uni, biv)
        x = r.random(5)
        want = sum(log_density(u, [x[i]]) for i, u in enumerate(uni))
        for i, j in m.forest.edges:
            want += log_density(biv[(i, j)], x[[i, j]]) - log_density(uni[i], [x[i]]) - log_density(uni[j], [x[j]])
        assert forest_log_density(m, x) == pytest.approx(want, abs=1e-12)


def test_missing_edge_estimator():
    rng = np.random.default_rng(3)
    uni, _ = models(rng, 3)
    with pytest.raises(DataError):
        ForestModel(Forest(3, ((0, 1),)), uni, {})


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=10, max_size=10))
def test_select_forest_is_max_weight_forest(ws):
    d = 5
    pairs = list(combinations(range(d), 2))
    weights = dict(zip(pairs, ws))

    def acyclic(edges):
        try:
            Forest(d, tuple(edges))
            return True
        except DataError:
            return False

    best = max(sum(weights[e] for e in sub)
               for r in range(len(pairs) + 1) for sub in combinations(pairs, r)
               if all(weights[e] > 0 for e in sub) and acyclic(sub))
    f = select_forest(weights, d)
    assert sum(weights[e] for e in f.edges) == pytest.approx(best, abs=1e-12)
    assert all(weights[e] > 0 for e in f.edges)


def test_fde_matches_isde_on_pair_structure(synth):
    train, valid, truth, fit = synth
    W, _ = split(train, fit.table.split)
    fde = fit_fde(fit.table, W)
    assert fde.forest.components() == fit.solve.partition == truth
    assert np.allclose(fde.logpdf(valid), fit.model.logpdf(valid), atol=1e-10)
    weights = edge_weights(fit.table)
    assert weights[(0, 1)] > 0 and weights[(2, 3)] > 0


def test_fde_needs_pairs(synth):
    train = synth[0]
    t1 = fit_isde(train, 1, SplitSpec(300, 300, 4), GRID).table
    with pytest.raises(DataError):
        fit_fde(t1, split(train, t1.split)[0])


def test_fitted_model_properties(synth):
    train, valid, _, fit = synth
    x = valid.values[0]
    m = fit.model
    parts = [log_density(est, x[list(b)]) for b, est in zip(m.partition.blocks, m.blocks)]
    assert fitted_model_log_density(m, x) == pytest.approx(sum(parts), abs=1e-12)

    W, _ = split(train, fit.table.split)
    single = assemble_isde(fit.table, W, Partition(((0, 1), (2,), (3,), (4,))))
    assert single.block_logpdfs(valid)[:, 0] == pytest.approx(single.blocks[0].logpdf(valid.values[:, [0, 1]]))
    with pytest.raises(DataError):
        m.logpdf(np.zeros((1, 3)))
    with pytest.raises(DataError):
        FittedModel(m.partition, m.blocks[:1])


def test_block_relabelling_invariance(synth):
    train, valid, _, fit = synth
    perm = [4, 2, 3, 0, 1]  # new column c holds old feature perm[c]
    inv = {old: new for new, old in enumerate(perm)}
    W, _ = split(train, fit.table.split)
    p = fit.solve.partition
    moved = Partition(tuple(tuple(inv[i] for i in b) for b in p.blocks))
    ests = []
    for b in moved.blocks:
        old = tuple(perm[i] for i in b)
        ests.append(KdeModel(W.values[:, list(old)], fit.table.bandwidth(tuple(sorted(old)))))
    m2 = FittedModel(moved, tuple(ests))
    assert np.allclose(m2.logpdf(valid.values[:, perm]), fit.model.logpdf(valid), atol=1e-12)


def test_isde_with_k1_is_singletons(synth):
    train = synth[0]
    fit = fit_isde(train, 1, SplitSpec(300, 300, 4), GRID)
    assert fit.solve.partition == Partition.singletons(5)


def test_validation_score(synth):
    _, valid, _, fit = synth
    one = valid.values[:1]
    assert validation_score(fit.model.logpdf, one) == pytest.approx(float(fit.model.logpdf(one)[0]))
    perm = np.random.default_rng(0).permutation(valid.n_rows)
    assert validation_score(fit.model.logpdf, valid) == pytest.approx(
        validation_score(fit.model.logpdf, valid.values[perm]), abs=1e-12)
    with pytest.raises(DataError):
        validation_score(fit.model.logpdf, np.zeros((0, 5)))


def test_cvkde_is_deterministic_and_loses_to_isde(synth):
    train, valid, _, fit = synth
    a, b = fit_cvkde(train, GRID, 5, 3), fit_cvkde(train, GRID, 5, 3)
    assert a.bandwidth == b.bandwidth
    assert validation_score(fit.model.logpdf, valid) > validation_score(a.logpdf, valid)


def test_gaussian_isde():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(400, 3))
    x[:, 1] += x[:, 0]
    fit = fit_isde(Dataset(x), 3, SplitSpec(200, 200, 0), estimator="gaussian")
    # the dependent pair must stay together; the independent feature may
    # tag along, since its held-out cost is within sampling noise
    assert is_admissible(Partition(((0, 1), (2,))), fit.solve.partition)
    assert np.isfinite(fit.model.logpdf(x[:5])).all()
