"""Numba-compiled hot loops: nearest-neighbor / radius queries on a uniform
grid, first-k-per-group scheduling, and interference field sums."""

from __future__ import annotations

import numpy as np
from numba import njit

from ._grid import grid_build

__all__ = ["build_index", "query_nn", "query_radius_pairs",
           "first_k_per_group", "interference"]


def build_index(pts, lo, hi):
    return grid_build(pts, lo, hi)


@njit(cache=True)
def _query_nn_impl(pts, order, start, nx, cs, lo, q):
    m = q.shape[0]
    out_idx = np.full(m, -1, np.int64)
    out_d = np.full(m, np.inf, np.float64)
    for i in range(m):
        qx = q[i, 0]
        qy = q[i, 1]
        cx = int((qx - lo) / cs)
        cy = int((qy - lo) / cs)
        if cx < 0:
            cx = 0
        elif cx >= nx:
            cx = nx - 1
        if cy < 0:
            cy = 0
        elif cy >= nx:
            cy = nx - 1
        best = np.inf
        bi = -1
        ring = 0
        while ring < 2 * nx:
            if bi >= 0:
                dmin = (ring - 1) * cs
                if dmin > 0.0 and dmin * dmin > best:
                    break
            x0 = cx - ring
            x1 = cx + ring
            for gx in range(x0, x1 + 1):
                if gx < 0 or gx >= nx:
                    continue
                on_x_edge = (gx == x0) or (gx == x1)
                for gy in range(cy - ring, cy + ring + 1):
                    if gy < 0 or gy >= nx:
                        continue
                    if not on_x_edge and gy != cy - ring and gy != cy + ring:
                        continue
                    c = gx * nx + gy
                    for k in range(start[c], start[c + 1]):
                        j = order[k]
                        dx = pts[j, 0] - qx
                        dy = pts[j, 1] - qy
                        d2 = dx * dx + dy * dy
                        if d2 < best:
                            best = d2
                            bi = j
            ring += 1
        out_idx[i] = bi
        out_d[i] = np.sqrt(best)
    return out_idx, out_d


def query_nn(index, q):
    pts, order, start, nx, cs, lo = index
    return _query_nn_impl(pts, order, start, nx, cs, lo,
                          np.ascontiguousarray(q, dtype=np.float64))


@njit(cache=True)
def _radius_pairs_impl(pts, order, start, nx, cs, lo, q, radii, exclude):
    m = q.shape[0]
    # counting pass
    total = 0
    for i in range(m):
        qx = q[i, 0]
        qy = q[i, 1]
        r = radii[i]
        r2 = r * r
        gx0 = max(0, int((qx - r - lo) / cs))
        gx1 = min(nx - 1, int((qx + r - lo) / cs))
        gy0 = max(0, int((qy - r - lo) / cs))
        gy1 = min(nx - 1, int((qy + r - lo) / cs))
        for gx in range(gx0, gx1 + 1):
            for gy in range(gy0, gy1 + 1):
                c = gx * nx + gy
                for k in range(start[c], start[c + 1]):
                    j = order[k]
                    if j == exclude[i]:
                        continue
                    dx = pts[j, 0] - qx
                    dy = pts[j, 1] - qy
                    if dx * dx + dy * dy <= r2:
                        total += 1
    pair_q = np.empty(total, np.int64)
    pair_p = np.empty(total, np.int64)
    w = 0
    for i in range(m):
        qx = q[i, 0]
        qy = q[i, 1]
        r = radii[i]
        r2 = r * r
        gx0 = max(0, int((qx - r - lo) / cs))
        gx1 = min(nx - 1, int((qx + r - lo) / cs))
        gy0 = max(0, int((qy - r - lo) / cs))
        gy1 = min(nx - 1, int((qy + r - lo) / cs))
        for gx in range(gx0, gx1 + 1):
            for gy in range(gy0, gy1 + 1):
                c = gx * nx + gy
                for k in range(start[c], start[c + 1]):
                    j = order[k]
                    if j == exclude[i]:
                        continue
                    dx = pts[j, 0] - qx
                    dy = pts[j, 1] - qy
                    if dx * dx + dy * dy <= r2:
                        pair_q[w] = i
                        pair_p[w] = j
                        w += 1
    return pair_q, pair_p


def query_radius_pairs(index, q, radii, exclude):
    pts, order, start, nx, cs, lo = index
    return _radius_pairs_impl(pts, order, start, nx, cs, lo,
                              np.ascontiguousarray(q, dtype=np.float64),
                              np.ascontiguousarray(radii, dtype=np.float64),
                              np.ascontiguousarray(exclude, dtype=np.int64))


@njit(cache=True)
def first_k_per_group(group, n_groups, k):
    """Mark the first k occurrences of each group id (negatives skipped)."""
    counts = np.zeros(n_groups, np.int64)
    out = np.zeros(group.shape[0], np.bool_)
    for i in range(group.shape[0]):
        g = group[i]
        if g >= 0 and counts[g] < k:
            counts[g] += 1
            out[i] = True
    return out


@njit(cache=True, fastmath=True)
def interference(bs_pos, gains, upos, serving, null_ptr, null_idx, alpha):
    """Aggregate path-loss-weighted interference at each user position.

    Sums gains[b] * d^-alpha over all base stations, then removes the serving
    station and the user's nulled list. Stations with zero gain are inactive.
    """
    n_u = upos.shape[0]
    n_b = bs_pos.shape[0]
    out = np.zeros(n_u, np.float64)
    is4 = alpha == 4.0
    half = alpha * 0.5
    for i in range(n_u):
        x = upos[i, 0]
        y = upos[i, 1]
        s = 0.0
        if is4:
            for b in range(n_b):
                g = gains[b]
                if g > 0.0:
                    dx = bs_pos[b, 0] - x
                    dy = bs_pos[b, 1] - y
                    d2 = dx * dx + dy * dy
                    s += g / (d2 * d2)
        else:
            for b in range(n_b):
                g = gains[b]
                if g > 0.0:
                    dx = bs_pos[b, 0] - x
                    dy = bs_pos[b, 1] - y
                    s += g * (dx * dx + dy * dy) ** (-half)
        b = serving[i]
        if b >= 0 and gains[b] > 0.0:
            dx = bs_pos[b, 0] - x
            dy = bs_pos[b, 1] - y
            d2 = dx * dx + dy * dy
            s -= gains[b] / (d2 * d2) if is4 else gains[b] * d2 ** (-half)
        for kk in range(null_ptr[i], null_ptr[i + 1]):
            b = null_idx[kk]
            if gains[b] > 0.0:
                dx = bs_pos[b, 0] - x
                dy = bs_pos[b, 1] - y
                d2 = dx * dx + dy * dy
                s -= gains[b] / (d2 * d2) if is4 else gains[b] * d2 ** (-half)
        if s < 0.0:
            s = 0.0
        out[i] = s
    return out
