from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from isde.combinatorics import (CountError, blocks_containing_lowest, count_pair_partitions,
                                count_partitions, count_report, count_subsets, enumerate_partitions,
                                enumerate_subsets)

# Bell numbers and full subset counts for d = 10..15 as published
BELL = {10: 115_975, 11: 678_570, 12: 4_213_597, 13: 27_644_437, 14: 190_899_322, 15: 1_382_958_545}
ALL_SUBSETS = {10: 1_023, 11: 2_047, 12: 4_095, 13: 8_191, 14: 16_383, 15: 32_767}


@pytest.mark.parametrize("d", sorted(BELL))
def test_bell_and_subset_counts(d):
    assert count_partitions(d, d) == BELL[d]
    assert count_subsets(d, d) == ALL_SUBSETS[d]


@pytest.mark.parametrize("d,expected", [(20, 1350), (30, 4525), (40, 10700), (50, 20875)])
def test_subsets_up_to_three(d, expected):
    assert count_subsets(d, 3) == expected


def test_bounded_partitions_known_values():
    assert count_partitions(13, 5) == 25_719_630
    assert count_partitions(32, 3) > 10**19
    assert count_partitions(5, 1) == 1


def test_small_cases_by_brute_force():
    for d in range(1, 8):
        for k in range(1, d + 1):
            assert count_partitions(d, k) == sum(1 for _ in enumerate_partitions(d, k))
            assert count_subsets(d, k) == sum(1 for _ in enumerate_subsets(d, k))


@pytest.mark.parametrize("d", range(1, 17))
def test_pair_partitions_closed_form(d):
    k = min(2, d)
    assert count_pair_partitions(d) == count_partitions(d, k)


def test_pair_partitions_leading_digits():
    for d, (mant, exp) in {20: (2.4, 10), 30: (6.1, 17), 40: (7.3, 25), 50: (2.8, 34)}.items():
        assert round(count_pair_partitions(d) / 10**exp, 1) == mant


def test_invalid_arguments():
    for d, k in [(0, 1), (3, 0), (3, 4)]:
        with pytest.raises(CountError):
            count_partitions(d, k)
        with pytest.raises(CountError):
            count_subsets(d, k)


def test_report():
    r = count_report(13, 5)
    assert (r.n_subsets, r.n_partitions) == (2379, 25_719_630)


def test_enumeration_orders():
    subs = list(enumerate_subsets(4, 2))
    assert subs[:4] == [(0,), (1,), (2,), (3,)]
    assert subs[4:] == list(combinations(range(4), 2))
    parts = [p.blocks for p in enumerate_partitions(4, 4)]
    assert parts == sorted(parts)
    assert blocks_containing_lowest((1, 2, 3), 2) == [(1,), (1, 2), (1, 3)]


def test_enumeration_guard():
    with pytest.raises(CountError):
        next(enumerate_partitions(15, 15, guard=1000))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.data())
def test_enumerated_partitions_are_valid_and_distinct(d, data):
    k = data.draw(st.integers(1, d))
    seen = set()
    for p in enumerate_partitions(d, k):
        assert p.max_block <= k and p.d == d
        seen.add(p.blocks)
    assert len(seen) == count_partitions(d, k)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.data())
def test_subset_count_formula(d, data):
    k = data.draw(st.integers(1, d))
    assert count_subsets(d, k) == sum(comb(d, i) for i in range(1, k + 1))
