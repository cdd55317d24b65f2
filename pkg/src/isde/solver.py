"""Exact maximization of the summed block score over bounded-size partitions.

The problem is weighted exact cover: pick blocks from the score table so every
feature is covered once and the total score is maximal. Every search places
the lowest uncovered feature next, so partitions are generated in canonical
form and in lexicographic order.

* ``solve_best``: dense bitmask DP for d <= DENSE_LIMIT, depth-first
  branch and bound with an amortized per-feature bound above that.
* ``solve_kbest`` / ``solve_worst``: depth-first enumeration pruned by an
  upper bound on the best completion (exact DP values when available).
* ``solve_bruteforce``: scores every partition, used as the reference.
"""
from __future__ import annotations

import bisect
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import _backend
from .combinatorics import ENUMERATION_GUARD, count_partitions, count_subsets
from .data import FeatureSubset, Partition
from .scoring import SubsetScoreTable, partition_score

DENSE_LIMIT = 22


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class SolveResult:
    partition: Partition
    objective: float
    status: str = "optimal"
    nodes_explored: int = 0
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return {"partition": self.partition.to_list(), "objective": self.objective,
                "status": self.status, "nodes_explored": self.nodes_explored,
                "wall_time": self.wall_time}


_BITS = [1 << i for i in range(63)]


def _is_complete(table: SubsetScoreTable) -> bool:
    return (len(table.entries) == count_subsets(table.d, table.k)
            and max(map(len, table.entries), default=0) <= table.k)


class Candidates:
    """Table blocks flattened and grouped by lowest feature, lexicographic inside a group."""

    def __init__(self, table: SubsetScoreTable):
        if not _is_complete(table):
            raise SolverError(f"score table is incomplete for d={table.d}, k={table.k}")
        if table.d > 62:
            raise SolverError("at most 62 features are supported")
        self.table = table
        self.d = table.d
        blocks = sorted(table.entries)  # tuple order == lowest feature, then lex
        self.blocks: list[FeatureSubset] = blocks
        self._masks_py = [sum(map(_BITS.__getitem__, b)) for b in blocks]
        self._scores_py = [table.entries[b][1] for b in blocks]
        self.masks = np.array(self._masks_py, dtype=np.uint64)
        self.scores = np.array(self._scores_py, dtype=np.float64)
        firsts = [b[0] for b in blocks]
        self.offsets = np.searchsorted(firsts, np.arange(self.d + 1)).astype(np.int64)

    def group(self, low: int) -> range:
        return range(int(self.offsets[low]), int(self.offsets[low + 1]))

    def partition(self, path) -> Partition:
        return Partition(tuple(self.blocks[int(c)] for c in path))


def _check_result(p: Partition, d: int, k: int) -> None:
    if p.d != d or p.max_block > k:
        raise AssertionError(f"solver produced an infeasible partition {p.blocks}")


def _finish(cands: Candidates, p: Partition, nodes: int, t0: float) -> SolveResult:
    _check_result(p, cands.d, cands.table.k)
    return SolveResult(p, partition_score(cands.table, p), "optimal", int(nodes),
                       time.perf_counter() - t0)


def _dp(cands: Candidates):
    return _backend.solver_kernels.best_completion(cands.d, cands.masks, cands.scores, cands.offsets)


def solve_best(table: SubsetScoreTable) -> SolveResult:
    """Optimal partition; ties go to the lexicographically smallest one."""
    t0 = time.perf_counter()
    cands = Candidates(table)
    if cands.d > DENSE_LIMIT:
        res = solve_kbest(table, 1)[0]
        return SolveResult(res.partition, res.objective, res.status, res.nodes_explored,
                           time.perf_counter() - t0)
    memo, choice = _dp(cands)
    path, u = [], (1 << cands.d) - 1
    while u:
        c = int(choice[u])
        path.append(c)
        u ^= cands._masks_py[c]
    return _finish(cands, cands.partition(path), np.count_nonzero(~np.isnan(memo)), t0)


def solve_bruteforce(table: SubsetScoreTable, guard: int = ENUMERATION_GUARD) -> SolveResult:
    """Score every partition; the first maximum in enumeration order wins."""
    t0 = time.perf_counter()
    cands = Candidates(table)
    n = count_partitions(table.d, table.k)
    if n > guard:
        raise SolverError(f"{n} partitions exceed the brute-force guard {guard}")
    _, path, count = _backend.solver_kernels.exhaustive(cands.d, cands.masks, cands.scores, cands.offsets)
    return _finish(cands, cands.partition(path), count, t0)


def exhaustive_scores(table: SubsetScoreTable, guard: int = ENUMERATION_GUARD) -> np.ndarray:
    """Score of every partition, in the order of ``enumerate_partitions``."""
    cands = Candidates(table)
    n = count_partitions(table.d, table.k)
    if n > guard:
        raise SolverError(f"{n} partitions exceed the enumeration guard {guard}")
    out = np.empty(n)
    _, _, count = _backend.solver_kernels.exhaustive(cands.d, cands.masks, cands.scores,
                                                     cands.offsets, out)
    assert count == n
    return out


def _bound_fn(cands: Candidates) -> Callable[[int], float]:
    if cands.d <= DENSE_LIMIT:
        memo, _ = _dp(cands)
        return lambda u: float(memo[u])
    # amortized bound: a partition's score is a sum over features of
    # score(block)/|block|, so each feature contributes at most its best ratio
    best = [-math.inf] * cands.d
    for b, s in zip(cands.blocks, cands._scores_py):
        r = s / len(b)
        for j in b:
            if r > best[j]:
                best[j] = r

    def bound(u: int) -> float:
        total, j = 0.0, 0
        while u:
            if u & 1:
                total += best[j]
            u >>= 1
            j += 1
        return total

    return bound


def _slack(v: float) -> float:
    return 1e-9 * (1.0 + abs(v))


def _search(cands: Candidates, bound: Callable[[int], float], keep: Callable[[float], bool],
            threshold: Callable[[], float | None]) -> tuple[Iterator[tuple[float, list[int]]], list[int]]:
    """Depth-first enumeration of covers whose bound can reach ``threshold()``."""
    masks, scores = cands._masks_py, cands._scores_py
    nodes = [0]
    path: list[int] = []

    def rec(u: int, prefix: float):
        nodes[0] += 1
        if u == 0:
            if keep(prefix):
                yield prefix, list(path)
            return
        low = (u & -u).bit_length() - 1
        children = []
        for c in cands.group(low):
            mk = masks[c]
            if mk & ~u:
                continue
            nxt = prefix + scores[c]
            children.append((nxt + bound(u ^ mk), c, nxt))
        children.sort(key=lambda t: -t[0])
        for b, c, nxt in children:
            t = threshold()
            if t is not None and b < t - _slack(t):
                break
            path.append(c)
            yield from rec(u ^ masks[c], nxt)
            path.pop()

    return rec((1 << cands.d) - 1, 0.0), nodes


def solve_kbest(table: SubsetScoreTable, K: int) -> list[SolveResult]:
    """The K best distinct partitions, by descending score then lexicographic order."""
    if K < 1:
        raise SolverError("K must be >= 1")
    total = count_partitions(table.d, table.k)
    if K > total:
        raise SolverError(f"K={K} exceeds the {total} partitions available")
    t0 = time.perf_counter()
    cands = Candidates(table)
    bound = _bound_fn(cands)
    ranked: list[tuple[tuple[float, tuple], float, Partition]] = []

    def threshold():
        return ranked[-1][1] if len(ranked) == K else None

    gen, nodes = _search(cands, bound, lambda v: True, threshold)
    for value, path in gen:
        p = cands.partition(path)
        key = (-value, p.blocks)
        if len(ranked) == K and key >= ranked[-1][0]:
            continue
        bisect.insort(ranked, (key, value, p), key=lambda t: t[0])
        del ranked[K:]
    dt = time.perf_counter() - t0
    out = []
    for _, _, p in ranked:
        _check_result(p, table.d, table.k)
        out.append(SolveResult(p, partition_score(table, p), "optimal", nodes[0], dt))
    return out


def solve_worst(table: SubsetScoreTable, K: int) -> list[SolveResult]:
    """The K lowest-scoring partitions, ascending (maximization of the negated table)."""
    res = solve_kbest(table.negated(), K)
    return [SolveResult(r.partition, partition_score(table, r.partition), r.status,
                        r.nodes_explored, r.wall_time) for r in res]


def partitions_above(table: SubsetScoreTable, threshold: float) -> list[tuple[Partition, float]]:
    """Every partition scoring strictly above ``threshold``, in enumeration order."""
    cands = Candidates(table)
    gen, _ = _search(cands, _bound_fn(cands), lambda v: v > threshold, lambda: threshold)
    out = [(cands.partition(path), v) for v, path in gen]
    out.sort(key=lambda t: t[0].blocks)
    return out
