"""Exact counts and enumerations over bounded-size subsets and partitions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterator

from .data import FeatureSubset, Partition

ENUMERATION_GUARD = 10**8


class CountError(ValueError):
    pass


def _check(d: int, k: int) -> None:
    if d < 1 or not 1 <= k <= d:
        raise CountError(f"need 1 <= k <= d, got d={d}, k={k}")


@dataclass(frozen=True)
class CountReport:
    d: int
    k: int
    n_subsets: int
    n_partitions: int


def count_subsets(d: int, k: int) -> int:
    """Number of nonempty subsets of {0..d-1} with at most k elements."""
    _check(d, k)
    return sum(comb(d, i) for i in range(1, k + 1))


@lru_cache(maxsize=None)
def _bounded_bell(d: int, k: int) -> int:
    if d == 0:
        return 1
    # the lowest remaining feature sits in a block of size j
    return sum(comb(d - 1, j - 1) * _bounded_bell(d - j, k) for j in range(1, min(k, d) + 1))


def count_partitions(d: int, k: int) -> int:
    """Number of partitions of {0..d-1} with every block of size <= k."""
    _check(d, k)
    return _bounded_bell(d, k)


def count_pair_partitions(d: int) -> int:
    """Partitions into singletons and pairs, by counting the number i of pairs.

    Sum over i of C(d,2) C(d-2,2) ... C(d-2i+2,2) / i!.
    """
    if d < 1:
        raise CountError(f"need d >= 1, got {d}")
    total = 0
    for i in range(d // 2 + 1):
        ordered = 1
        for j in range(i):
            ordered *= comb(d - 2 * j, 2)
        total += ordered // factorial(i)
    return total


def count_report(d: int, k: int) -> CountReport:
    return CountReport(d, k, count_subsets(d, k), count_partitions(d, k))


def enumerate_subsets(d: int, k: int) -> Iterator[FeatureSubset]:
    """All subsets with 1 <= |S| <= k, by cardinality then lexicographically."""
    _check(d, k)
    for size in range(1, k + 1):
        yield from combinations(range(d), size)


def blocks_containing_lowest(remaining: tuple[int, ...], k: int) -> list[FeatureSubset]:
    """Blocks of size <= k made of ``remaining[0]`` plus other remaining items,
    in lexicographic order of the sorted tuples."""
    head, rest = remaining[0], remaining[1:]
    out = [(head,) + c for size in range(min(k, len(remaining))) for c in combinations(rest, size)]
    out.sort()
    return out


def enumerate_partitions(d: int, k: int, guard: int = ENUMERATION_GUARD) -> Iterator[Partition]:
    """Every partition in canonical form, in lexicographic order of the block lists.

    The order matches the exhaustive solver so that "first in enumeration"
    and "lexicographically smallest" coincide.
    """
    n = count_partitions(d, k)
    if n > guard:
        raise CountError(f"{n} partitions exceed the enumeration guard {guard}")

    def rec(remaining: tuple[int, ...], prefix: list[FeatureSubset]):
        if not remaining:
            yield Partition(tuple(prefix))
            return
        for block in blocks_containing_lowest(remaining, k):
            left = tuple(i for i in remaining if i not in block)
            prefix.append(block)
            yield from rec(left, prefix)
            prefix.pop()

    yield from rec(tuple(range(d)), [])
