"""Pure numpy / Python versions of the compiled kernels.

Same signatures and semantics as ``_kde_core`` and ``_solver_core``; used
when the extensions are not built or ``ISDE_PURE_PYTHON=1`` is set.
"""
from __future__ import annotations

import sys

import numpy as np

_CHUNK_ELEMS = 1 << 22


def log_kernel_sums(train, queries, inv2h2):
    train = np.ascontiguousarray(train, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    inv2h2 = np.asarray(inv2h2, dtype=np.float64)
    m, p = train.shape
    if queries.shape[1] != p:
        raise ValueError("dimension mismatch between train and query points")
    q = queries.shape[0]
    out = np.empty((q, inv2h2.shape[0]))
    step = max(1, _CHUNK_ELEMS // max(1, m * p))
    for lo in range(0, q, step):
        block = queries[lo : lo + step]
        d2 = np.zeros((block.shape[0], m))
        for t in range(p):
            diff = block[:, t, None] - train[None, :, t]
            d2 += diff * diff
        mn = d2.min(axis=1)
        gap = mn[:, None] - d2
        for b, c in enumerate(inv2h2):
            out[lo : lo + step, b] = np.log(np.exp(gap * c).sum(axis=1)) - mn * c
    return out


def _lowbit(u: int) -> int:
    return (u & -u).bit_length() - 1


def best_completion(d, masks, scores, offsets):
    size = 1 << d
    memo = np.full(size, np.nan)
    choice = np.full(size, -1, dtype=np.int64)
    masks = [int(x) for x in masks]
    scores = [float(x) for x in scores]
    offsets = [int(x) for x in offsets]
    memo_d: dict[int, float] = {0: 0.0}
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * d + 100))

    def rec(u: int) -> float:
        if u in memo_d:
            return memo_d[u]
        low = _lowbit(u)
        best, arg = 0.0, -1
        for c in range(offsets[low], offsets[low + 1]):
            mk = masks[c]
            if mk & ~u:
                continue
            v = scores[c] + rec(u ^ mk)
            if arg < 0 or v > best:
                best, arg = v, c
        memo_d[u] = best
        choice[u] = arg
        return best

    try:
        if masks:
            rec(size - 1)
    finally:
        sys.setrecursionlimit(old)
    for u, v in memo_d.items():
        memo[u] = v
    return memo, choice


def exhaustive(d, masks, scores, offsets, record=None):
    masks = [int(x) for x in masks]
    scores = [float(x) for x in scores]
    offsets = [int(x) for x in offsets]
    state = {"best": 0.0, "path": [], "count": 0}
    path: list[int] = []

    def rec(u: int, prefix: float) -> None:
        if u == 0:
            if record is not None:
                record[state["count"]] = prefix
            if state["count"] == 0 or prefix > state["best"]:
                state["best"] = prefix
                state["path"] = list(path)
            state["count"] += 1
            return
        low = _lowbit(u)
        for c in range(offsets[low], offsets[low + 1]):
            mk = masks[c]
            if mk & ~u:
                continue
            path.append(c)
            rec(u ^ mk, prefix + scores[c])
            path.pop()

    rec((1 << d) - 1, 0.0)
    return state["best"], np.array(state["path"], dtype=np.int64), state["count"]
