"""Split/merge geometry on partitions: edit distance, neighbours, random walks."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .data import DataError, Partition


def _ground(p: Partition) -> int:
    return p.d


def join_block_count(p: Partition, q: Partition) -> int:
    """Blocks of the finest common coarsening: connected components of the
    bipartite graph linking blocks of p and q that intersect."""
    d = p.d
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for b in part.blocks:
            r = find(b[0])
            for i in b[1:]:
                parent[find(i)] = r
    return len({find(i) for i in range(d)})


def edit_distance(p: Partition, q: Partition) -> int:
    """Minimal number of block splits and merges turning p into q.

    Equals |p| + |q| - 2 |join(p, q)|: merge within each join block, then split
    into q's blocks. No shorter path exists because each operation changes the
    block count by one and the join block count by at most one.
    """
    if _ground(p) != _ground(q):
        raise DataError(f"partitions cover different ground sets ({p.d} vs {q.d} features)")
    return len(p) + len(q) - 2 * join_block_count(p, q)


def edit_profile(ref: Partition, candidates: Sequence[Partition]) -> list[tuple[Partition, int]]:
    return [(c, edit_distance(ref, c)) for c in candidates]


def random_partition(d: int, k: int, seed: int | np.random.Generator) -> Partition:
    """Shuffle the features, then cut the order into consecutive groups with
    sizes drawn uniformly from 1..k (the last group takes what is left)."""
    if not 1 <= k <= d:
        raise DataError(f"need 1 <= k <= d, got d={d}, k={k}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(d)
    blocks, pos = [], 0
    while pos < d:
        size = int(rng.integers(1, k + 1))
        blocks.append(tuple(int(i) for i in perm[pos : pos + size]))
        pos += size
    return Partition(tuple(blocks))


def _bipartitions(block: tuple[int, ...]):
    # the first element stays on the left, so each unordered split appears once
    head, rest = block[0], block[1:]
    for size in range(len(rest)):
        for left_rest in combinations(rest, size):
            left = (head,) + left_rest
            right = tuple(i for i in rest if i not in left_rest)
            yield left, right


def merge_neighbors(p: Partition, k: int) -> list[Partition]:
    blocks = p.blocks
    out = []
    for a, b in combinations(range(len(blocks)), 2):
        if len(blocks[a]) + len(blocks[b]) <= k:
            others = [blk for n, blk in enumerate(blocks) if n not in (a, b)]
            out.append(Partition(tuple(others) + (blocks[a] + blocks[b],)))
    return out


def split_neighbors(p: Partition) -> list[Partition]:
    blocks = p.blocks
    out = []
    for n, blk in enumerate(blocks):
        if len(blk) < 2:
            continue
        others = blocks[:n] + blocks[n + 1 :]
        for left, right in _bipartitions(blk):
            out.append(Partition(others + (left, right)))
    return out


def walk_neighbors(p: Partition, k: int) -> list[Partition]:
    """Partitions one split or merge away that keep every block size <= k."""
    if p.max_block > k:
        raise DataError(f"partition has a block larger than k={k}")
    return merge_neighbors(p, k) + split_neighbors(p)


@dataclass(frozen=True)
class WalkTrace:
    steps: tuple[Partition, ...]
    seed: int
    k: int


def random_walk(p0: Partition, length: int, k: int, seed: int, mode: str = "uniform") -> WalkTrace:
    """Random walk over bounded partitions.

    ``mode="uniform"`` picks uniformly among all neighbours. ``mode="type-first"``
    first picks split or merge with equal probability (among the operation
    types that are available), then a neighbour of that type.
    """
    if length < 0:
        raise DataError("walk length must be >= 0")
    if mode not in ("uniform", "type-first"):
        raise DataError(f"unknown walk mode {mode!r}")
    rng = np.random.default_rng(seed)
    steps = [p0]
    cur = p0
    for _ in range(length):
        if mode == "uniform":
            nbrs = walk_neighbors(cur, k)
        else:
            kinds = [n for n in (merge_neighbors(cur, k), split_neighbors(cur)) if n]
            nbrs = kinds[int(rng.integers(len(kinds)))] if kinds else []
        if not nbrs:
            raise DataError(f"partition {cur.blocks} has no neighbours within k={k}")
        cur = nbrs[int(rng.integers(len(nbrs)))]
        steps.append(cur)
    return WalkTrace(tuple(steps), seed, k)
