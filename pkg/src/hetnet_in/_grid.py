"""Uniform-grid spatial index construction (shared by both kernel backends)."""

from __future__ import annotations

import math

import numpy as np


def grid_build(pts: np.ndarray, lo: float, hi: float):
    """Bucket 2-D points into a uniform nx-by-nx grid over [lo, hi]^2.

    Returns (pts, order, start, nx, cs, lo): ``order`` lists point indices
    sorted by cell, ``start`` is the CSR offset array over cells (row-major
    cell id = cx * nx + cy), ``cs`` the cell side.
    """
    n = pts.shape[0]
    nx = max(1, int(math.sqrt(max(n, 1))))
    cs = (hi - lo) / nx
    if cs <= 0:
        cs = 1.0
    cx = np.clip(((pts[:, 0] - lo) / cs).astype(np.int64), 0, nx - 1)
    cy = np.clip(((pts[:, 1] - lo) / cs).astype(np.int64), 0, nx - 1)
    cell = cx * nx + cy
    order = np.argsort(cell, kind="stable")
    counts = np.bincount(cell, minlength=nx * nx)
    start = np.zeros(nx * nx + 1, dtype=np.int64)
    np.cumsum(counts, out=start[1:])
    return (np.ascontiguousarray(pts, dtype=np.float64), order, start,
            np.int64(nx), float(cs), float(lo))
