# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot kernels.

Same contracts as svpforge.kernels.pure, restricted to inputs the dispatcher
has already proven safe for fixed-width arithmetic: determinants accumulate
in int64, box enumeration accumulates column sums in int64 and norm powers
in 128-bit integers.  The dispatcher falls back to the pure backend whenever
those bounds cannot be certified.
"""

from libc.stdlib cimport free, malloc, llabs

from svpforge.errors import BudgetExceededError

BACKEND = "compiled"

cdef extern from *:
    ctypedef long long int128 "__int128"


cdef inline long long _det2(long long a, long long b, long long c, long long d) nogil:
    return a * d - b * c


def det_sweep(rows, int width):
    """First singular width x width row combination in lex order, or None."""
    cdef Py_ssize_t n = len(rows)
    cdef int b = width
    if b < 1 or b > 4 or b > n:
        raise ValueError("compiled det_sweep handles 1 <= width <= 4")
    cdef long long* a = <long long*> malloc(n * b * sizeof(long long))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(b * sizeof(Py_ssize_t))
    if a == NULL or idx == NULL:
        free(a); free(idx)
        raise MemoryError()
    cdef Py_ssize_t i, j
    for i in range(n):
        row = rows[i]
        if len(row) != b:
            free(a); free(idx)
            raise ValueError("rows must be exactly width long")
        for j in range(b):
            a[i * b + j] = row[j]
    for j in range(b):
        idx[j] = j
    cdef long long det
    cdef long long* r0
    cdef long long* r1
    cdef long long* r2
    cdef long long* r3
    cdef long long p01, p02, p03, p12, p13, p23
    cdef long long q01, q02, q03, q12, q13, q23
    cdef Py_ssize_t k
    cdef bint done = 0
    while not done:
        r0 = a + idx[0] * b
        if b == 1:
            det = r0[0]
        elif b == 2:
            r1 = a + idx[1] * b
            det = _det2(r0[0], r0[1], r1[0], r1[1])
        elif b == 3:
            r1 = a + idx[1] * b
            r2 = a + idx[2] * b
            det = (r0[0] * _det2(r1[1], r1[2], r2[1], r2[2])
                   - r0[1] * _det2(r1[0], r1[2], r2[0], r2[2])
                   + r0[2] * _det2(r1[0], r1[1], r2[0], r2[1]))
        else:
            r1 = a + idx[1] * b
            r2 = a + idx[2] * b
            r3 = a + idx[3] * b
            p01 = _det2(r0[0], r0[1], r1[0], r1[1])
            p02 = _det2(r0[0], r0[2], r1[0], r1[2])
            p03 = _det2(r0[0], r0[3], r1[0], r1[3])
            p12 = _det2(r0[1], r0[2], r1[1], r1[2])
            p13 = _det2(r0[1], r0[3], r1[1], r1[3])
            p23 = _det2(r0[2], r0[3], r1[2], r1[3])
            q01 = _det2(r2[0], r2[1], r3[0], r3[1])
            q02 = _det2(r2[0], r2[2], r3[0], r3[2])
            q03 = _det2(r2[0], r2[3], r3[0], r3[3])
            q12 = _det2(r2[1], r2[2], r3[1], r3[2])
            q13 = _det2(r2[1], r2[3], r3[1], r3[3])
            q23 = _det2(r2[2], r2[3], r3[2], r3[3])
            det = p01 * q23 - p02 * q13 + p03 * q12 + p12 * q03 - p13 * q02 + p23 * q01
        if det == 0:
            out = tuple(idx[j] for j in range(b))
            free(a); free(idx)
            return out
        # advance the combination odometer
        k = b - 1
        while k >= 0 and idx[k] == n - b + k:
            k -= 1
        if k < 0:
            done = 1
        else:
            idx[k] += 1
            for j in range(k + 1, b):
                idx[j] = idx[j - 1] + 1
    free(a); free(idx)
    return None


cdef inline int128 _pow128(long long base, int p) nogil:
    cdef int128 out = 1
    cdef int i
    for i in range(p):
        out = out * base
    return out


cdef struct BoxCtx:
    Py_ssize_t m
    Py_ssize_t ncols
    int c
    int p            # 0 means max-norm
    long long* acc
    int* coeffs
    int* best_vec
    # per-row sparse support
    Py_ssize_t* sup_off
    Py_ssize_t* sup_col
    long long* sup_val
    # finalization spans keyed by completed depth (c0 == -1: none)
    Py_ssize_t* fin_c0
    Py_ssize_t* fin_c1
    Py_ssize_t* loose
    Py_ssize_t n_loose
    long long nodes
    long long budget
    int128 best
    bint have_best


cdef int _dfs(BoxCtx* ctx, Py_ssize_t depth, int128 finalized, bint nonzero):
    """Returns 0 normally, 1 when the node budget is exceeded."""
    cdef int128 total, nf, blk
    cdef long long aval
    cdef Py_ssize_t j, s
    cdef int t
    if depth == ctx.m:
        if not nonzero:
            return 0
        total = finalized
        if ctx.p == 0:
            for j in range(ctx.n_loose):
                aval = llabs(ctx.acc[ctx.loose[j]])
                if aval > total:
                    total = aval
        else:
            for j in range(ctx.n_loose):
                aval = llabs(ctx.acc[ctx.loose[j]])
                total = total + _pow128(aval, ctx.p)
        if (not ctx.have_best) or total < ctx.best:
            ctx.best = total
            ctx.have_best = 1
            for j in range(ctx.m):
                ctx.best_vec[j] = ctx.coeffs[j]
        return 0
    cdef Py_ssize_t s0 = ctx.sup_off[depth]
    cdef Py_ssize_t s1 = ctx.sup_off[depth + 1]
    cdef Py_ssize_t f0 = ctx.fin_c0[depth + 1]
    cdef Py_ssize_t f1 = ctx.fin_c1[depth + 1]
    for t in range(-ctx.c, ctx.c + 1):
        ctx.nodes += 1
        if ctx.nodes > ctx.budget:
            return 1
        ctx.coeffs[depth] = t
        if t != 0:
            for s in range(s0, s1):
                ctx.acc[ctx.sup_col[s]] += t * ctx.sup_val[s]
        nf = finalized
        if f0 >= 0:
            if ctx.p == 0:
                for j in range(f0, f1):
                    aval = llabs(ctx.acc[j])
                    if aval > nf:
                        nf = aval
            else:
                blk = 0
                for j in range(f0, f1):
                    aval = llabs(ctx.acc[j])
                    blk = blk + _pow128(aval, ctx.p)
                nf = finalized + blk
        if (not ctx.have_best) or nf < ctx.best:
            if _dfs(ctx, depth + 1, nf, nonzero or t != 0):
                return 1
        if t != 0:
            for s in range(s0, s1):
                ctx.acc[ctx.sup_col[s]] -= t * ctx.sup_val[s]
    ctx.coeffs[depth] = 0
    return 0


cdef object _int128_to_py(int128 v):
    cdef unsigned long long lo = <unsigned long long> v
    cdef unsigned long long hi = <unsigned long long> (v >> 64)
    return (int(hi) << 64) | int(lo)


def box_minimum(rows, int c, p, groups, loose_cols, budget):
    """Compiled twin of pure.box_minimum; see that docstring for semantics."""
    cdef Py_ssize_t m = len(rows)
    if m == 0:
        raise ValueError("need at least one row")
    if c < 1:
        raise ValueError("box radius must be at least 1")
    cdef Py_ssize_t ncols = len(rows[0])
    cdef Py_ssize_t i, j, k, nsup
    cdef BoxCtx ctx
    ctx.m = m
    ctx.ncols = ncols
    ctx.c = c
    ctx.p = 0 if p is None else int(p)
    ctx.nodes = 0
    ctx.budget = budget
    ctx.have_best = 0
    ctx.best = 0
    ctx.acc = NULL; ctx.coeffs = NULL; ctx.best_vec = NULL
    ctx.sup_off = NULL; ctx.sup_col = NULL; ctx.sup_val = NULL
    ctx.fin_c0 = NULL; ctx.fin_c1 = NULL; ctx.loose = NULL

    # count support entries
    nsup = 0
    for i in range(m):
        row = rows[i]
        for j in range(ncols):
            if row[j] != 0:
                nsup += 1
    ctx.acc = <long long*> malloc(ncols * sizeof(long long))
    ctx.coeffs = <int*> malloc(m * sizeof(int))
    ctx.best_vec = <int*> malloc(m * sizeof(int))
    ctx.sup_off = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    ctx.sup_col = <Py_ssize_t*> malloc((nsup if nsup else 1) * sizeof(Py_ssize_t))
    ctx.sup_val = <long long*> malloc((nsup if nsup else 1) * sizeof(long long))
    ctx.fin_c0 = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    ctx.fin_c1 = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    ctx.loose = <Py_ssize_t*> malloc((len(loose_cols) if len(loose_cols) else 1) * sizeof(Py_ssize_t))
    if (ctx.acc == NULL or ctx.coeffs == NULL or ctx.best_vec == NULL
            or ctx.sup_off == NULL or ctx.sup_col == NULL or ctx.sup_val == NULL
            or ctx.fin_c0 == NULL or ctx.fin_c1 == NULL or ctx.loose == NULL):
        _free_ctx(&ctx)
        raise MemoryError()
    try:
        for j in range(ncols):
            ctx.acc[j] = 0
        k = 0
        for i in range(m):
            ctx.sup_off[i] = k
            row = rows[i]
            for j in range(ncols):
                if row[j] != 0:
                    ctx.sup_col[k] = j
                    ctx.sup_val[k] = row[j]
                    k += 1
        ctx.sup_off[m] = k
        for i in range(m + 1):
            ctx.fin_c0[i] = -1
            ctx.fin_c1[i] = -1
        for g in groups:
            ctx.fin_c0[<Py_ssize_t> g[1]] = <Py_ssize_t> g[2]
            ctx.fin_c1[<Py_ssize_t> g[1]] = <Py_ssize_t> g[3]
        ctx.n_loose = len(loose_cols)
        for i in range(ctx.n_loose):
            ctx.loose[i] = loose_cols[i]

        if _dfs(&ctx, 0, 0, 0):
            raise BudgetExceededError(
                f"box enumeration exceeded {budget} nodes"
            )
        best = _int128_to_py(ctx.best) if ctx.have_best else None
        vec = tuple(ctx.best_vec[i] for i in range(m)) if ctx.have_best else None
        nodes = ctx.nodes
    finally:
        _free_ctx(&ctx)
    return best, vec, nodes


cdef void _free_ctx(BoxCtx* ctx):
    free(ctx.acc); free(ctx.coeffs); free(ctx.best_vec)
    free(ctx.sup_off); free(ctx.sup_col); free(ctx.sup_val)
    free(ctx.fin_c0); free(ctx.fin_c1); free(ctx.loose)
