"""Euclidean projection onto the capped simplex {x : 0 <= x <= cap, sum x = total}."""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleSum


def project_capped_simplex(v: np.ndarray, total: float, cap: float = 1.0,
                           tol: float = 1e-14) -> np.ndarray:
    """Project v onto the box-constrained simplex by bisection on the shift.

    The projection is clip(v - nu, 0, cap) for the unique nu making the sum
    equal ``total``; the sum is continuous and nonincreasing in nu.
    """
    v = np.asarray(v, dtype=float)
    n = len(v)
    if total < -tol or total > n * cap + tol:
        raise InfeasibleSum(f"sum {total} unreachable with {n} entries capped at {cap}")
    lo = float(v.min()) - cap - 1.0
    hi = float(v.max()) + 1.0
    for _ in range(200):
        nu = 0.5 * (lo + hi)
        s = np.clip(v - nu, 0.0, cap).sum()
        if s > total:
            lo = nu
        else:
            hi = nu
        if hi - lo < tol:
            break
    x = np.clip(v - 0.5 * (lo + hi), 0.0, cap)
    # exact-sum polish on the strictly interior coordinates
    free = (x > 0) & (x < cap)
    gap = total - x.sum()
    if np.any(free):
        x[free] += gap / free.sum()
        np.clip(x, 0.0, cap, out=x)
    return x
