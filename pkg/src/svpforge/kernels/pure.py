"""Pure backend for the hot kernels: exact, no compiled extension.

Two entry points mirror the compiled module:

  det_sweep(rows, width)   -> first singular width x width row combination, or None
  box_minimum(...)         -> exhaustive norm minimum over a coefficient box

Determinants use numpy int64 vectorization when a proven overflow bound
holds, and Python big integers otherwise, so results are exact either way.
Arbitrary precision is slower than the compiled version; it exists for
correctness comparison and as the fallback when the extension is absent.
"""

from __future__ import annotations

import itertools

import numpy as np

from svpforge.errors import BudgetExceededError

BACKEND = "pure"

# Largest |entry| for which the int64 determinant formulas cannot overflow:
# the b=4 expansion sums 6 products of two 2x2 minors, each minor at most
# 2*maxabs**2, so |any intermediate| <= 24*maxabs**4; similar counts below.
INT64_DET_MAXABS = {1: (1 << 62), 2: 2_000_000_000, 3: 1_000_000, 4: 20_000}

_CHUNK = 1 << 17


def det_sweep(rows, width):
    """Scan all width-row combinations in lexicographic order.

    Returns the index tuple of the first combination whose square submatrix
    has determinant zero, or None when every submatrix is nonsingular.
    ``rows`` is a sequence of integer rows, each exactly ``width`` long.
    """
    n = len(rows)
    if width < 1 or width > n:
        raise ValueError("width must lie in [1, number of rows]")
    if any(len(r) != width for r in rows):
        raise ValueError("rows must be exactly width long")
    maxabs = max((abs(x) for row in rows for x in row), default=0)
    if width <= 4 and maxabs <= INT64_DET_MAXABS[width]:
        return _det_sweep_numpy(rows, width)
    return _det_sweep_bigint(rows, width)


def _det_sweep_numpy(rows, b):
    arr = np.array(rows, dtype=np.int64)
    combos = itertools.combinations(range(len(rows)), b)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            return None
        idx = np.array(chunk, dtype=np.intp)
        s = arr[idx]  # (K, b, b)
        dets = _det_int64(s, b)
        zeros = np.flatnonzero(dets == 0)
        if zeros.size:
            return chunk[int(zeros[0])]


def _det_int64(s, b):
    if b == 1:
        return s[:, 0, 0]
    if b == 2:
        return s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    if b == 3:
        return (
            s[:, 0, 0] * (s[:, 1, 1] * s[:, 2, 2] - s[:, 1, 2] * s[:, 2, 1])
            - s[:, 0, 1] * (s[:, 1, 0] * s[:, 2, 2] - s[:, 1, 2] * s[:, 2, 0])
            + s[:, 0, 2] * (s[:, 1, 0] * s[:, 2, 1] - s[:, 1, 1] * s[:, 2, 0])
        )
    # b == 4: Laplace expansion along the first two rows; pij and qij are the
    # 2x2 minors of rows (0,1) and rows (2,3) on column pair (i,j).
    def p(i, j):
        return s[:, 0, i] * s[:, 1, j] - s[:, 0, j] * s[:, 1, i]

    def q(i, j):
        return s[:, 2, i] * s[:, 3, j] - s[:, 2, j] * s[:, 3, i]

    return (
        p(0, 1) * q(2, 3)
        - p(0, 2) * q(1, 3)
        + p(0, 3) * q(1, 2)
        + p(1, 2) * q(0, 3)
        - p(1, 3) * q(0, 2)
        + p(2, 3) * q(0, 1)
    )


def _det_sweep_bigint(rows, b):
    for combo in itertools.combinations(range(len(rows)), b):
        sub = [rows[i] for i in combo]
        if det_exact(sub) == 0:
            return combo
    return None


def det_exact(mat):
    """Exact determinant of a small square integer matrix (Python ints)."""
    b = len(mat)
    if b == 1:
        return mat[0][0]
    if b == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if b == 3:
        (a, bb, c), (d, e, f), (g, h, i) = mat
        return a * (e * i - f * h) - bb * (d * i - f * g) + c * (d * h - e * g)
    return _det_bareiss([list(r) for r in mat])


def _det_bareiss(m):
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def box_minimum(rows, c, p, groups, loose_cols, budget):
    """Minimum p-th power norm of v*rows over nonzero v in [-c, c]^m.

    ``p`` is a positive integer, or None for the max-norm (the returned
    "power" is then the max absolute entry itself).  ``groups`` is a list of
    (row_start, row_end, col_start, col_end) spans with contiguous ascending
    row ranges covering all rows; each span's columns must be touched only by
    its own rows, so the span's contribution is final once its last row gets
    a coefficient and a partial sum already at or above the best seen so far
    prunes the subtree.  ``loose_cols`` are the remaining columns, summed at
    the leaves.  Coefficient vectors are visited in lexicographic order and
    only strict improvements are kept, so ties resolve to the
    lexicographically smallest vector.

    Returns (best_power, best_vector, nodes); ``nodes`` counts coefficient
    assignments and is compared against ``budget``.
    """
    m = len(rows)
    if m == 0:
        raise ValueError("need at least one row")
    if c < 1:
        raise ValueError("box radius must be at least 1")
    ncols = len(rows[0])
    support = [tuple((j, row[j]) for j in range(ncols) if row[j]) for row in rows]
    finalize_at = {r1: (c0, c1) for (_r0, r1, c0, c1) in groups}
    acc = [0] * ncols
    coeffs = [0] * m
    state = {"best": None, "vec": None, "nodes": 0}
    inf = p is None

    def dfs(depth, finalized, nonzero):
        if depth == m:
            if not nonzero:
                return
            total = finalized
            if inf:
                for j in loose_cols:
                    a = acc[j]
                    if a < 0:
                        a = -a
                    if a > total:
                        total = a
            else:
                for j in loose_cols:
                    a = acc[j]
                    if a < 0:
                        a = -a
                    total += a**p
            if state["best"] is None or total < state["best"]:
                state["best"] = total
                state["vec"] = tuple(coeffs)
            return
        sup = support[depth]
        bound = finalize_at.get(depth + 1)
        for t in range(-c, c + 1):
            state["nodes"] += 1
            if state["nodes"] > budget:
                raise BudgetExceededError(
                    f"box enumeration exceeded {budget} nodes"
                )
            coeffs[depth] = t
            if t:
                for j, val in sup:
                    acc[j] += t * val
            nf = finalized
            if bound is not None:
                c0, c1 = bound
                if inf:
                    for j in range(c0, c1):
                        a = acc[j]
                        if a < 0:
                            a = -a
                        if a > nf:
                            nf = a
                else:
                    for j in range(c0, c1):
                        a = acc[j]
                        if a < 0:
                            a = -a
                        nf += a**p
            if state["best"] is None or nf < state["best"]:
                dfs(depth + 1, nf, nonzero or t != 0)
            if t:
                for j, val in sup:
                    acc[j] -= t * val
        coeffs[depth] = 0

    dfs(0, 0, False)
    return state["best"], state["vec"], state["nodes"]
