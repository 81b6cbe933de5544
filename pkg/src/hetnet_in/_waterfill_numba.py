"""JIT-compiled water-filling solver for separable rational objectives.

Mirrors the pure-numpy solver in ``optimizer._waterfill`` for objectives
whose per-lane derivative is

    a_j * scale * ( sum_k c_k d_k / (l_k x + d_k)^2  -  shift_j )

i.e. a positive combination of convex decreasing rational terms minus a
per-lane constant.  The common multiplier is bisected per candidate row and
the per-lane root is found by Newton iteration, exactly as in the fallback;
the final exact-sum polish stays outside (shared with the fallback path).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def waterfill_rows(a, c, l, d, scale, shift, c2, outer_iters, newton_iters):
    rows, lanes = a.shape
    terms = c.shape[1]
    t = np.zeros((rows, lanes))
    g0 = np.empty(lanes)
    g1 = np.empty(lanes)
    xprev = np.empty(lanes)
    for r in range(rows):
        for j in range(lanes):
            xprev[j] = 0.0
        # endpoint derivative values per live lane
        s0 = 0.0
        s1 = 0.0
        for k in range(terms):
            s0 += c[r, k] / d[r, k]
            q = l[r, k] + d[r, k]
            s1 += c[r, k] * d[r, k] / (q * q)
        lo = np.inf
        hi = -np.inf
        for j in range(lanes):
            if a[r, j] > 0.0:
                g0[j] = a[r, j] * scale * (s0 - shift[r, j])
                g1[j] = a[r, j] * scale * (s1 - shift[r, j])
                if g1[j] < lo:
                    lo = g1[j]
                if g0[j] > hi:
                    hi = g0[j]
        lo -= 1.0
        hi += 1.0

        for it in range(outer_iters + 1):
            nu = 0.5 * (lo + hi)
            ssum = 0.0
            for j in range(lanes):
                if a[r, j] <= 0.0:
                    t[r, j] = 0.0
                    continue
                if g1[j] >= nu:
                    x = 1.0
                elif g0[j] <= nu:
                    x = 0.0
                else:
                    # warm start from the previous multiplier's root; the
                    # per-lane equation is convex decreasing, so Newton
                    # converges from any start inside [0, 1]
                    x = xprev[j]
                    for _ in range(newton_iters):
                        der = 0.0
                        dd = 0.0
                        for k in range(terms):
                            q = l[r, k] * x + d[r, k]
                            cd = c[r, k] * d[r, k]
                            der += cd / (q * q)
                            dd += -2.0 * cd * l[r, k] / (q * q * q)
                        g = a[r, j] * scale * (der - shift[r, j]) - nu
                        gd = a[r, j] * scale * dd
                        if gd > -1e-300:
                            gd = -1e-300
                        x_new = x - g / gd
                        if x_new < 0.0:
                            x_new = 0.0
                        elif x_new > 1.0:
                            x_new = 1.0
                        if abs(x_new - x) < 1e-15:
                            x = x_new
                            break
                        x = x_new
                    xprev[j] = x
                t[r, j] = x
                ssum += x
            if it < outer_iters:
                if ssum > c2:
                    lo = nu
                else:
                    hi = nu
    return t
