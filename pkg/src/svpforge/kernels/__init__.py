"""Kernel backend selection.

The compiled extension is used when it imported cleanly and the inputs fit
its fixed-width arithmetic; otherwise the pure backend runs (same results,
arbitrary precision).  Set SVPFORGE_PURE=1 to force the pure backend.
"""

from __future__ import annotations

import os

from . import pure

compiled = None
if not os.environ.get("SVPFORGE_PURE"):
    try:
        from . import _speedups as compiled
    except ImportError:
        compiled = None

_INT64_LIMIT = 1 << 62
_INT128_LIMIT = 1 << 126


def backend_name() -> str:
    return "compiled" if compiled is not None else "pure"


def det_sweep(rows, width):
    """Route to the compiled sweep when int64 accumulation is provably safe."""
    if compiled is not None and 1 <= width <= 4:
        maxabs = max((abs(x) for row in rows for x in row), default=0)
        if maxabs <= pure.INT64_DET_MAXABS[width]:
            return compiled.det_sweep(rows, width)
    return pure.det_sweep(rows, width)


def box_minimum(rows, c, p, groups, loose_cols, budget):
    """Route to the compiled enumerator when its width bounds are certified."""
    if compiled is not None and _box_bounds_ok(rows, c, p):
        return compiled.box_minimum(rows, c, p, groups, loose_cols, budget)
    return pure.box_minimum(rows, c, p, groups, loose_cols, budget)


def box_backend(rows, c, p) -> str:
    """The backend box_minimum would pick for these inputs."""
    if compiled is not None and _box_bounds_ok(rows, c, p):
        return "compiled"
    return "pure"


def _box_bounds_ok(rows, c, p) -> bool:
    if not rows:
        return False
    ncols = len(rows[0])
    col_bound = 0
    for j in range(ncols):
        b = sum(abs(row[j]) for row in rows) * c
        if b > col_bound:
            col_bound = b
    if col_bound >= _INT64_LIMIT:
        return False
    if p is None:
        return True
    return ncols * col_bound**p < _INT128_LIMIT
