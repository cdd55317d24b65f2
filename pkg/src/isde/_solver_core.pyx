# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exact-cover kernels over feature bitmasks.

Candidate blocks come flattened and grouped by their smallest feature:
``masks[offsets[i]:offsets[i+1]]`` are the blocks whose lowest feature is i,
in lexicographic order of their sorted index tuples. Every search always
places the lowest uncovered feature, so each partition is reached once and
in lexicographic order.
"""
import numpy as np
from libc.stdint cimport uint64_t, int64_t


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _lowbit(uint64_t u) noexcept nogil:
    return __builtin_ctzll(u)


cdef struct DPState:
    const double *scores
    const int64_t *lookup
    double *memo
    int64_t *choice
    unsigned char *seen


cdef double _dp(DPState *st, uint64_t u) noexcept nogil:
    # blocks through the lowest feature of u are lowbit | sub for sub a submask of the rest
    if st.seen[u]:
        return st.memo[u]
    cdef uint64_t lowbit = u & (~u + 1)
    cdef uint64_t rest = u ^ lowbit
    cdef uint64_t sub = rest, blk
    cdef int64_t c, arg = -1
    cdef double v, best = 0.0
    while True:
        blk = sub | lowbit
        c = st.lookup[blk]
        if c >= 0:
            v = st.scores[c] + _dp(st, u ^ blk)
            if arg < 0 or v > best or (v == best and c < arg):
                best = v
                arg = c
        if sub == 0:
            break
        sub = (sub - 1) & rest
    st.seen[u] = 1
    st.memo[u] = best
    st.choice[u] = arg
    return best


def best_completion(int d, const uint64_t[::1] masks, const double[::1] scores,
                    const int64_t[::1] offsets):
    """Dense DP over uncovered-feature masks.

    Returns (memo, choice): memo[u] is the best total score of an exact cover
    of u, choice[u] the candidate index placed on u's lowest feature. Ties go
    to the smaller candidate index, i.e. the lexicographically smaller block.
    """
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << d
    cdef Py_ssize_t c
    memo_arr = np.full(size, np.nan)
    choice_arr = np.full(size, -1, dtype=np.int64)
    seen_arr = np.zeros(size, dtype=np.uint8)
    lookup_arr = np.full(size, -1, dtype=np.int64)
    cdef double[::1] memo = memo_arr
    cdef int64_t[::1] choice = choice_arr
    cdef unsigned char[::1] seen = seen_arr
    cdef int64_t[::1] lookup = lookup_arr
    cdef DPState st
    if masks.shape[0] == 0:
        return memo_arr, choice_arr
    for c in range(masks.shape[0]):
        lookup[masks[c]] = c
    st.scores = &scores[0]
    st.lookup = &lookup[0]
    st.memo = &memo[0]
    st.choice = &choice[0]
    st.seen = &seen[0]
    memo[0] = 0.0
    seen[0] = 1
    with nogil:
        _dp(&st, size - 1)
    return memo_arr, choice_arr


cdef struct BFState:
    const uint64_t *masks
    const double *scores
    const int64_t *offsets
    int64_t *path
    int64_t *best_path
    int best_depth
    double best
    int64_t count
    double *record
    int has_record


cdef void _bf(BFState *st, uint64_t u, double prefix, int depth) noexcept nogil:
    cdef int low, i
    cdef int64_t c
    cdef uint64_t mk
    if u == 0:
        if st.has_record:
            st.record[st.count] = prefix
        if st.count == 0 or prefix > st.best:
            st.best = prefix
            st.best_depth = depth
            for i in range(depth):
                st.best_path[i] = st.path[i]
        st.count += 1
        return
    low = _lowbit(u)
    for c in range(st.offsets[low], st.offsets[low + 1]):
        mk = st.masks[c]
        if mk & ~u:
            continue
        st.path[depth] = c
        _bf(st, u ^ mk, prefix + st.scores[c], depth + 1)


def exhaustive(int d, const uint64_t[::1] masks, const double[::1] scores,
               const int64_t[::1] offsets, double[::1] record=None):
    """Score every exact cover of {0..d-1} by summing block scores in order.

    Returns (best_value, best_path, count). The first maximum in enumeration
    order wins. If ``record`` is given, the score of the i-th partition is
    written to record[i].
    """
    path_arr = np.zeros(max(d, 1), dtype=np.int64)
    best_arr = np.zeros(max(d, 1), dtype=np.int64)
    cdef int64_t[::1] path = path_arr
    cdef int64_t[::1] best_path = best_arr
    cdef BFState st
    st.masks = &masks[0]
    st.scores = &scores[0]
    st.offsets = &offsets[0]
    st.path = &path[0]
    st.best_path = &best_path[0]
    st.best_depth = 0
    st.best = 0.0
    st.count = 0
    st.has_record = record is not None
    if record is not None:
        st.record = &record[0]
    cdef uint64_t full = ((<uint64_t> 1) << d) - 1 if d < 64 else <uint64_t> -1
    with nogil:
        _bf(&st, full, 0.0, 0)
    return st.best, best_arr[: st.best_depth].copy(), st.count
