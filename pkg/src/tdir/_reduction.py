"""Column reduction of sparse boundary matrices over the two-element field.

Columns are processed in filtration order.  Each column is repeatedly
XOR-merged with the stored column owning its lowest index until its
lowest index is unclaimed (the column becomes a pivot) or it empties.
Reduced columns live in a flat preallocated pool; on overflow the caller
retries with a larger pool, so the kernel never allocates inside loops.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _reduce_pool(indptr, indices, n_rows, skip, pool_cap):
    n_cols = indptr.size - 1
    pivot_slot = np.full(n_rows, -1, dtype=np.int64)
    pivot_of_col = np.full(n_cols, -1, dtype=np.int64)
    pool = np.empty(pool_cap, dtype=np.int64)
    pool_ptr = np.empty(n_cols + 1, dtype=np.int64)
    pool_ptr[0] = 0
    n_stored = 0
    pool_end = 0
    cur = np.empty(n_rows, dtype=np.int64)
    nxt = np.empty(n_rows, dtype=np.int64)
    for j in range(n_cols):
        if skip[j]:
            continue
        m = indptr[j + 1] - indptr[j]
        for q in range(m):
            cur[q] = indices[indptr[j] + q]
        while m > 0:
            low = cur[m - 1]
            slot = pivot_slot[low]
            if slot == -1:
                if pool_end + m > pool_cap:
                    return pivot_of_col, np.int64(-1)
                pivot_slot[low] = n_stored
                for q in range(m):
                    pool[pool_end + q] = cur[q]
                pool_end += m
                n_stored += 1
                pool_ptr[n_stored] = pool_end
                pivot_of_col[j] = low
                break
            s0 = pool_ptr[slot]
            s1 = pool_ptr[slot + 1]
            i = 0
            k = s0
            t = 0
            while i < m and k < s1:
                a = cur[i]
                b = pool[k]
                if a < b:
                    nxt[t] = a
                    i += 1
                    t += 1
                elif a > b:
                    nxt[t] = b
                    k += 1
                    t += 1
                else:
                    i += 1
                    k += 1
            while i < m:
                nxt[t] = cur[i]
                i += 1
                t += 1
            while k < s1:
                nxt[t] = pool[k]
                k += 1
                t += 1
            tmp = cur
            cur = nxt
            nxt = tmp
            m = t
    return pivot_of_col, pool_end


def reduce_columns(indptr, indices, n_rows, skip=None):
    """Reduce a sparse GF(2) matrix given in CSC-like form.

    indptr/indices follow the usual compressed layout; row indices within
    a column must be sorted ascending.  skip marks columns already known
    to reduce to zero; they are left untouched.  Returns an array mapping
    each column to its pivot row, -1 for zero (or skipped) columns.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    n_cols = indptr.size - 1
    if skip is None:
        skip = np.zeros(n_cols, dtype=np.uint8)
    else:
        skip = np.ascontiguousarray(skip, dtype=np.uint8)
    n_rows = max(int(n_rows), 1)
    cap = max(1024, 4 * indices.size)
    while True:
        pivot_of_col, used = _reduce_pool(indptr, indices, n_rows, skip, cap)
        if used >= 0:
            return pivot_of_col
        cap *= 4
