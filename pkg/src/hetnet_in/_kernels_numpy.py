"""NumPy/scipy fallback implementations of the hot kernels.

Same interfaces as the numba backend; results agree (the scheduling kernel is
bit-identical, geometric queries return the same sets, interference sums may
differ only by float summation order).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

__all__ = ["build_index", "query_nn", "query_radius_pairs",
           "first_k_per_group", "interference"]


def build_index(pts, lo, hi):
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    tree = cKDTree(pts) if len(pts) else None
    return (pts, tree)


def query_nn(index, q):
    pts, tree = index
    q = np.asarray(q, dtype=np.float64)
    if tree is None or len(q) == 0:
        return (np.full(len(q), -1, np.int64), np.full(len(q), np.inf))
    d, idx = tree.query(q, k=1)
    return idx.astype(np.int64), d


def query_radius_pairs(index, q, radii, exclude):
    pts, tree = index
    q = np.asarray(q, dtype=np.float64)
    if tree is None or len(q) == 0:
        return (np.empty(0, np.int64), np.empty(0, np.int64))
    lists = tree.query_ball_point(q, np.asarray(radii, dtype=float))
    pair_q, pair_p = [], []
    for i, lst in enumerate(lists):
        for j in lst:
            if j != exclude[i]:
                pair_q.append(i)
                pair_p.append(j)
    return (np.asarray(pair_q, dtype=np.int64),
            np.asarray(pair_p, dtype=np.int64))


def first_k_per_group(group, n_groups, k):
    """Mark the first k occurrences of each group id (negatives skipped)."""
    group = np.asarray(group)
    order = np.argsort(group, kind="stable")
    sorted_g = group[order]
    # rank of each element within its group, in original index order
    first_pos = np.searchsorted(sorted_g, sorted_g, side="left")
    rank = np.arange(len(group)) - first_pos
    out = np.zeros(len(group), dtype=bool)
    out[order] = (sorted_g >= 0) & (rank < k)
    return out


def interference(bs_pos, gains, upos, serving, null_ptr, null_idx, alpha):
    n_u = upos.shape[0]
    out = np.zeros(n_u)
    if bs_pos.shape[0] == 0 or n_u == 0:
        return out
    active = gains > 0.0
    bp = bs_pos[active]
    g = gains[active]
    # chunk users to bound the broadcast matrix
    chunk = max(1, int(4e6 // max(len(bp), 1)))
    for s0 in range(0, n_u, chunk):
        s1 = min(n_u, s0 + chunk)
        d2 = ((upos[s0:s1, None, :] - bp[None, :, :]) ** 2).sum(-1)
        if alpha == 4.0:
            contrib = g / (d2 * d2)
        else:
            contrib = g * d2 ** (-alpha / 2.0)
        out[s0:s1] = contrib.sum(axis=1)
    # remove serving and nulled contributions
    def _single(b, i):
        d2 = ((bs_pos[b] - upos[i]) ** 2).sum()
        return gains[b] / (d2 * d2) if alpha == 4.0 else gains[b] * d2 ** (-alpha / 2.0)

    for i in range(n_u):
        b = serving[i]
        if b >= 0 and gains[b] > 0.0:
            out[i] -= _single(b, i)
        for kk in range(null_ptr[i], null_ptr[i + 1]):
            b = null_idx[kk]
            if gains[b] > 0.0:
                out[i] -= _single(b, i)
    np.maximum(out, 0.0, out=out)
    return out
