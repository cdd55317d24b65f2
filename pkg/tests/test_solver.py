import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import isde.solver as solver
from isde.combinatorics import count_partitions, enumerate_partitions
from isde.data import Partition, SplitSpec
from isde.scoring import SubsetScoreTable, partition_score
from isde.solver import (SolverError, exhaustive_scores, partitions_above, solve_best, solve_bruteforce,
                         solve_kbest, solve_worst)

from .conftest import random_table


def ranking(table):
    parts = list(enumerate_partitions(table.d, table.k))
    return sorted(parts, key=lambda p: (-partition_score(table, p), p.blocks))


@pytest.mark.parametrize("seed", range(30))
def test_best_matches_bruteforce(backend, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 9))
    k = int(rng.integers(1, min(4, d) + 1))
    t = random_table(d, k, seed)
    a, b = solve_best(t), solve_bruteforce(t)
    assert a.objective == b.objective
    assert a.partition == b.partition
    assert a.partition.max_block <= k


@pytest.mark.parametrize("seed", range(15))
def test_ties_resolve_to_lexicographic_first(backend, seed):
    t = random_table(6, 3, seed, integer=True)
    best = ranking(t)[0]
    assert solve_best(t).partition == best
    assert solve_bruteforce(t).partition == best


@pytest.mark.parametrize("d,k", [(4, 4), (5, 3), (6, 2), (7, 4)])
def test_kbest_matches_full_ranking(backend, d, k):
    t = random_table(d, k, d * 10 + k)
    got = solve_kbest(t, 10)
    want = ranking(t)[:10]
    assert [r.partition for r in got] == want
    assert [r.objective for r in got] == [partition_score(t, p) for p in want]


def test_kbest_with_ties(backend):
    t = random_table(5, 3, 3, integer=True)
    assert [r.partition for r in solve_kbest(t, 12)] == ranking(t)[:12]


def test_worst_matches_full_ranking(backend):
    t = random_table(6, 3, 4)
    worst = sorted(enumerate_partitions(6, 3), key=lambda p: (partition_score(t, p), p.blocks))[:5]
    assert [r.partition for r in solve_worst(t, 5)] == worst


def test_kbest_of_everything(backend):
    t = random_table(4, 2, 0)
    n = count_partitions(4, 2)
    assert len(solve_kbest(t, n)) == n
    with pytest.raises(SolverError):
        solve_kbest(t, n + 1)
    with pytest.raises(SolverError):
        solve_kbest(t, 0)


def test_large_d_path_matches_dense(backend, monkeypatch):
    tables = [random_table(8, 3, s) for s in range(5)]
    dense = [solve_best(t) for t in tables]
    monkeypatch.setattr(solver, "DENSE_LIMIT", 3)
    for t, ref in zip(tables, dense):
        assert solve_best(t).partition == ref.partition
        assert [r.partition for r in solve_kbest(t, 4)] == ranking(t)[:4]


def test_exhaustive_scores_follow_enumeration_order(backend):
    t = random_table(6, 4, 8)
    scores = exhaustive_scores(t)
    want = [partition_score(t, p) for p in enumerate_partitions(6, 4)]
    assert np.array_equal(scores, np.array(want))


def test_partitions_above_threshold(backend):
    t = random_table(6, 3, 2)
    scores = {p: partition_score(t, p) for p in enumerate_partitions(6, 3)}
    thr = float(np.quantile(list(scores.values()), 0.9))
    got = partitions_above(t, thr)
    assert [p for p, _ in got] == sorted((p for p, v in scores.items() if v > thr), key=lambda p: p.blocks)


def test_incomplete_table_rejected():
    t = random_table(4, 2, 0)
    del t.entries[(0, 1)]
    with pytest.raises(SolverError):
        solve_best(t)


def test_bruteforce_guard():
    with pytest.raises(SolverError):
        solve_bruteforce(random_table(8, 8, 0), guard=100)


def test_single_feature_and_k1(backend):
    t = random_table(1, 1, 0)
    assert solve_best(t).partition == Partition(((0,),))
    t = random_table(6, 1, 0)
    assert solve_best(t).partition == Partition.singletons(6)


def test_infeasible_output_is_caught():
    with pytest.raises(AssertionError):
        solver._check_result(Partition(((0, 1, 2),)), 3, 2)


def test_result_json():
    r = solve_best(random_table(4, 2, 1))
    obj = r.to_json()
    assert obj["status"] == "optimal" and obj["partition"] == r.partition.to_list()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 4), st.integers(0, 10**6))
def test_best_is_optimal_property(d, k, seed):
    k = min(k, d)
    t = random_table(d, k, seed)
    best = solve_best(t)
    assert best.partition.max_block <= k and best.partition.d == d
    assert best.objective == max(partition_score(t, p) for p in enumerate_partitions(d, k))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10**6), st.floats(-5, 5), st.floats(0.1, 3))
def test_affine_per_feature_shift_keeps_optimum(d, seed, shift, scale):
    # adding c*|S| to every block adds c*d to every partition
    t = random_table(d, d, seed)
    shifted = SubsetScoreTable(d, d, SplitSpec(1, 1, 0),
                               {s: (h, scale * v + shift * len(s)) for s, (h, v) in t.entries.items()})
    assert solve_bruteforce(shifted).partition == solve_bruteforce(t).partition
