"""Cache-placement and nulling-radius optimization.

Maximizes the closed-form lower bound of the area spectral efficiency over
(cached set, caching probabilities T, nulling coefficient mu) by alternating:

* a water-filling KKT solver for T given the cached set and mu (the
  lower-bound objective is concave and separable, so the optimum is
  characterized by a common multiplier);
* an enumeration of cached sets whose complement inside the SBS catalogue is
  a consecutive index block (provably sufficient under full load);
* a grid-plus-golden-section line search over mu on its feasible interval.

A convex-concave procedure (CCP) on the alternating-binomial *upper* bound
provides the benchmark used to certify the optimality gap, and MPC
(most-popular caching) / UDC (uniform-distributed caching) baselines are
included for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytics
from ._accel import USE_NUMBA
from ._proj import project_capped_simplex

if USE_NUMBA:
    try:
        from ._waterfill_numba import waterfill_rows as _wf_rows
    except ImportError:  # pragma: no cover - numba is a hard dependency
        _wf_rows = None
else:
    _wf_rows = None
from .analytics import SbsContext, build_sbs_context
from .errors import (InfeasibleSum, InvalidParam, NonConvergence,
                     NonMonotoneCCP)
from .model import CachingPolicy, ContentConfig, NetworkParams

__all__ = [
    "OptimizerConfig", "Solution", "mu_interval_upper", "kkt_continuous",
    "discrete_enumerate", "mu_line_search", "alternate", "ccp_upper",
    "baseline_mpc", "baseline_udc", "projected_gradient",
]


@dataclass(frozen=True)
class OptimizerConfig:
    bisect_tol: float = 1e-8
    mu_grid: int = 201
    golden_tol: float = 1e-4
    alt_max_iters: int = 50
    alt_tol: float = 1e-6
    ccp_max_iters: int = 100
    ccp_tol: float = 1e-7
    ccp_restarts: int = 5

    def __post_init__(self):
        for name in ("bisect_tol", "golden_tol", "alt_tol", "ccp_tol"):
            if not getattr(self, name) > 0:
                raise InvalidParam(f"{name} must be > 0")
        for name in ("mu_grid", "alt_max_iters", "ccp_max_iters",
                     "ccp_restarts"):
            if getattr(self, name) < 1:
                raise InvalidParam(f"{name} must be >= 1")


@dataclass(frozen=True)
class Solution:
    nc_set: tuple
    T: np.ndarray
    mu: float
    objective: float
    trace: tuple

    def policy(self) -> CachingPolicy:
        return CachingPolicy(self.nc_set, self.T, self.mu)


DEFAULT_CONFIG = OptimizerConfig()


def mu_interval_upper(net: NetworkParams, n_cached: int, c2: int) -> float:
    """Upper end of the feasible nulling-coefficient interval.

    delta_a = antennas per served user, delta_f = catalogue dilution; the
    radius must keep the expected granted-null budget consistent with the
    spare antennas.
    """
    delta_a = net.M2 / net.U2
    delta_f = n_cached / c2
    if delta_a >= delta_f:
        return math.sqrt(delta_a / delta_f)
    if delta_a <= 1.0:
        return 0.0
    return math.sqrt((delta_a - 1.0) / (delta_f - 1.0))


# ---------------------------------------------------------------------------
# Rational-term bookkeeping


def _lower_terms(ctx: SbsContext):
    """(weights p, T-coefficients r1, constants r2) with value
    psi_lower(t) = sum_k p_k t / (r1_k t + r2_k) and derivative
    psi_lower'(x) = sum_k p_k r2_k / (r1_k x + r2_k)^2."""
    p = np.concatenate([ctx.p_theta, [ctx.p_tail]])
    r1 = np.concatenate([ctx.rho1, [1.0 + ctx.w0_lin]])
    r2 = np.concatenate([ctx.rho2, [ctx.w0_const]])
    return p, r1, r2


def _upper_terms(ctx: SbsContext):
    """Flattened signed rational terms of the alternating-binomial upper
    bound: psi_upper(t) = sum_k c_k t / (l_k t + d_k), c_k signed."""
    cs, ls, ds = [ctx.p_tail], [1.0 + ctx.w0_lin], [ctx.w0_const]
    for theta in range(ctx.delta):
        cs.extend(ctx.p_theta[theta] * ctx.up_coef[theta])
        ls.extend(ctx.up_lin[theta])
        ds.extend(ctx.up_const[theta])
    return np.asarray(cs), np.asarray(ls), np.asarray(ds)


def _rational_value(t, c, l, d):
    t = np.asarray(t, dtype=float)
    return (c * t[..., None] / (l * t[..., None] + d)).sum(axis=-1)


def _rational_deriv(x, c, l, d):
    x = np.asarray(x, dtype=float)
    return (c * d / (l * x[..., None] + d) ** 2).sum(axis=-1)


def _rational_deriv2(x, c, l, d):
    """Second derivative of the rational sum (derivative of _rational_deriv)."""
    x = np.asarray(x, dtype=float)
    return (-2.0 * c * d * l / (l * x[..., None] + d) ** 3).sum(axis=-1)


# ---------------------------------------------------------------------------
# Water-filling KKT solver (vectorized over candidate rows)


def _waterfill(deriv, dderiv, a, c2, outer_iters=50, newton_iters=10,
               mask=None):
    """Solve max sum_n a_n psi(T_n) s.t. sum T = c2, 0 <= T <= 1 for a
    concave separable objective.

    deriv(x)/dderiv(x) map arrays of shape (..., lanes) to the a_n-free
    derivative of psi and its slope; a has shape (..., lanes), with zero
    entries marking padded lanes (their T is forced to 0 and excluded from
    the sum constraint).  The common multiplier nu is bisected; the
    per-coordinate root of a_n*deriv = nu is found by Newton from 0, which
    approaches from the left because the derivative terms are convex
    decreasing.  Returns T of the same shape as a.
    """
    live = a > 0.0 if mask is None else mask
    g0 = a * deriv(np.zeros_like(a))
    g1 = a * deriv(np.ones_like(a))
    neg_inf = np.where(live, g1, np.inf)
    lo = neg_inf.min(axis=-1, keepdims=True) - 1.0
    hi = np.where(live, g0, -np.inf).max(axis=-1, keepdims=True) + 1.0

    def t_of_nu(nu):
        x = np.zeros_like(a)
        for _ in range(newton_iters):
            g = a * deriv(x) - nu
            gd = np.minimum(a * dderiv(x), -1e-300)
            x = np.clip(x - g / gd, 0.0, 1.0)
        x = np.where(g1 >= nu, 1.0, x)
        x = np.where(g0 <= nu, 0.0, x)
        return np.where(live, x, 0.0)

    for _ in range(outer_iters):
        nu = 0.5 * (lo + hi)
        s = t_of_nu(nu).sum(axis=-1, keepdims=True)
        lo = np.where(s > c2, nu, lo)
        hi = np.where(s > c2, hi, nu)
    t = t_of_nu(0.5 * (lo + hi))
    # exact-sum polish on the live lanes
    if t.ndim == 1:
        out = project_capped_simplex(t[live], float(c2))
        res = np.zeros_like(t)
        res[live] = out
        return res
    res = np.zeros_like(t)
    for i in range(t.shape[0]):
        res[i, live[i]] = project_capped_simplex(t[i, live[i]], float(c2))
    return res


def _waterfill_rational(c, l, d, scale, a, c2, shift=None,
                        outer_iters=50, newton_iters=10):
    """Water-filling for rational-sum derivatives.

    Per-lane derivative: a_j * scale * (sum_k c_k d_k / (l_k x + d_k)^2
    - shift_j).  Dispatches to the JIT kernel when available, otherwise to
    the callable-based solver.  Shapes: a (rows, lanes) or (lanes,);
    c/l/d (rows, terms) flattened from any leading layout; shift
    (rows, lanes) or None.
    """
    single = a.ndim == 1
    aa = np.atleast_2d(np.asarray(a, dtype=float))
    rows, lanes = aa.shape
    c2d = np.ascontiguousarray(np.asarray(c, dtype=float).reshape(rows, -1))
    l2d = np.ascontiguousarray(np.asarray(l, dtype=float).reshape(rows, -1))
    d2d = np.ascontiguousarray(np.asarray(d, dtype=float).reshape(rows, -1))
    sh = (np.zeros((rows, lanes)) if shift is None
          else np.ascontiguousarray(np.asarray(shift, dtype=float)))
    if _wf_rows is not None:
        t = _wf_rows(aa, c2d, l2d, d2d, float(scale), sh, float(c2),
                     outer_iters, newton_iters)
        live = aa > 0.0
        for i in range(rows):
            t[i, live[i]] = project_capped_simplex(t[i, live[i]], float(c2))
            t[i, ~live[i]] = 0.0
    else:
        c3, l3, d3 = c2d[:, None, :], l2d[:, None, :], d2d[:, None, :]
        t = _waterfill(
            lambda x: scale * (_rational_deriv(x, c3, l3, d3) - sh),
            lambda x: scale * _rational_deriv2(x, c3, l3, d3),
            aa, c2, outer_iters=outer_iters, newton_iters=newton_iters)
    return t[0] if single else t


def kkt_continuous(nc_set, mu: float, net: NetworkParams,
                   content: ContentConfig,
                   cfg: OptimizerConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Optimal caching probabilities for the lower-bound objective at fixed
    cached set and nulling coefficient."""
    nc_set = tuple(nc_set)
    if len(nc_set) < content.c2:
        raise InfeasibleSum(
            f"cannot reach sum T = {content.c2} with {len(nc_set)} files")
    a = np.array([content.pop(n) for n in nc_set])
    ctx = build_sbs_context(net, content.c2, len(nc_set), mu)
    p, r1, r2 = _lower_terms(ctx)
    scale = ctx.ase2_scale
    return _waterfill_rational(p[None, :], r1[None, :], r2[None, :], scale,
                               a, content.c2)


# ---------------------------------------------------------------------------
# Scoring


def _q1_of(nc_set, net, content):
    policy = CachingPolicy(tuple(nc_set),
                           np.full(len(nc_set), content.c2 / len(nc_set)), 0.0)
    return analytics.q1(net, content, policy)


def _total_ase(nc_set, t, mu, net, content, variant):
    rate = math.log2(1.0 + net.tau)
    ctx = build_sbs_context(net, content.c2, len(nc_set), mu)
    a = np.array([content.pop(n) for n in nc_set])
    if variant == "lower":
        p, r1, r2 = _lower_terms(ctx)
        q2v = float(a @ _rational_value(np.asarray(t), p, r1, r2))
    elif variant == "upper":
        c, l, d = _upper_terms(ctx)
        q2v = float(a @ _rational_value(np.asarray(t), c, l, d))
    else:
        q2v = float(a @ np.array(
            [analytics.psi2_exact_ctx(ctx, float(x)) for x in np.asarray(t)]))
    return (rate * net.lambda1 * net.U1 * _q1_of(nc_set, net, content)
            + ctx.ase2_scale * q2v)


# ---------------------------------------------------------------------------
# Discrete cached-set enumeration


def _candidates(content: ContentConfig):
    """All cached sets whose backhaul complement is a consecutive index block
    inside the SBS catalogue (including the empty block)."""
    n2 = list(content.n2_set)
    c2 = content.c2
    out = [tuple(n2)]
    for nb in range(1, len(n2) - c2 + 1):
        for s in range(0, len(n2) - nb + 1):
            block = set(n2[s:s + nb])
            out.append(tuple(f for f in n2 if f not in block))
    return out


def discrete_enumerate(mu: float, net: NetworkParams, content: ContentConfig,
                       cfg: OptimizerConfig = DEFAULT_CONFIG,
                       solver: str = "kkt", rng=None, warm_state=None):
    """Best (nc_set, T, objective) over the consecutive-block candidates.

    solver='kkt' optimizes and scores the lower-bound objective; 'ccp'
    optimizes and scores the upper bound via the convex-concave procedure
    (rng supplies the random initial T).  Ties broken toward the
    lexicographically smallest cached set.
    """
    cands = _candidates(content)
    sizes = sorted({len(nc) for nc in cands})
    ctxs = {s: build_sbs_context(net, content.c2, s, mu) for s in sizes}
    scale = ctxs[sizes[0]].ase2_scale
    n_rows = len(cands)
    lanes = max(sizes)
    a = np.zeros((n_rows, lanes))
    for i, nc in enumerate(cands):
        a[i, :len(nc)] = [content.pop(n) for n in nc]

    if solver == "kkt":
        k = ctxs[sizes[0]].delta + 1
        p = np.empty((n_rows, 1, k))
        r1 = np.empty((n_rows, 1, k))
        r2 = np.empty((n_rows, 1, k))
        for i, nc in enumerate(cands):
            p[i, 0], r1[i, 0], r2[i, 0] = _lower_terms(ctxs[len(nc)])
        t = _waterfill_rational(p, r1, r2, scale, a, content.c2)
        q2v = (a * _rational_value(t, p, r1, r2)).sum(axis=-1)
    else:
        c = np.empty((n_rows, 1, 0))
        for i, nc in enumerate(cands):
            ci, li, di = _upper_terms(ctxs[len(nc)])
            if c.shape[-1] == 0:
                c = np.empty((n_rows, 1, len(ci)))
                l = np.empty_like(c)
                d = np.empty_like(c)
            c[i, 0], l[i, 0], d[i, 0] = ci, li, di
        t_init = None
        if warm_state is not None:
            prev = warm_state.get("t")
            if prev is not None and prev.shape == a.shape:
                t_init = prev
        t, q2v = _ccp_solve(c, l, d, scale, a, content.c2, cfg, rng,
                            t_init=t_init)
        if warm_state is not None:
            warm_state["t"] = t.copy()
    q2v = scale * q2v

    rate = math.log2(1.0 + net.tau)
    best = None
    for i, nc in enumerate(cands):
        obj = (rate * net.lambda1 * net.U1 * _q1_of(nc, net, content)
               + float(q2v[i]))
        if best is None or obj > best[0] or (obj == best[0] and nc < best[1]):
            best = (obj, nc, t[i, :len(nc)].copy())
    return best[1], best[2], best[0]


# ---------------------------------------------------------------------------
# CCP on the upper bound


def _ccp_solve(c, l, d, scale, a, c2, cfg: OptimizerConfig, rng,
               t_init: np.ndarray | None = None):
    """Convex-concave procedure, candidate rows solved together.

    The upper bound splits as eta1 (odd-order binomial terms plus the tail,
    positive weights) minus eta2 (even-order terms).  Both parts are concave
    in T, so linearizing eta2 at the previous iterate over-estimates it and
    each surrogate maximization (a water-filling problem) cannot decrease
    the true upper-bound objective.

    c/l/d have shape (rows, 1, terms); a has shape (rows, lanes) with zero
    padding.  Converged rows are retired from the iteration.
    """
    sign = c[0, 0] > 0  # identical alternating pattern on every row
    c1, l1, d1 = c[..., sign], l[..., sign], d[..., sign]
    c2t, l2t, d2t = -c[..., ~sign], l[..., ~sign], d[..., ~sign]

    live = a > 0.0
    if t_init is not None:
        t = np.array(t_init, dtype=float)
    elif rng is None:
        t = np.where(live, c2 / np.maximum(live.sum(-1, keepdims=True), 1), 0.0)
    else:
        raw = np.where(live, rng.random(a.shape), 0.0)
        t = np.zeros_like(a)
        for i in range(a.shape[0]):
            t[i, live[i]] = project_capped_simplex(raw[i, live[i]], float(c2))

    def true_obj(tt, ca, cl, cd, cca, ccl, ccd, aa):
        return (aa * (_rational_value(tt, ca, cl, cd)
                      - _rational_value(tt, cca, ccl, ccd))).sum(axis=-1)

    n_rows = a.shape[0]
    obj = true_obj(t, c1, l1, d1, c2t, l2t, d2t, a)
    active = np.arange(n_rows)
    for _ in range(cfg.ccp_max_iters):
        aa = a[active]
        ca, cl, cd = c1[active], l1[active], d1[active]
        cca, ccl, ccd = c2t[active], l2t[active], d2t[active]
        slope2 = _rational_deriv(t[active], cca, ccl, ccd)  # frozen point

        t_new = _waterfill_rational(ca, cl, cd, scale, aa, c2, shift=slope2)
        new = true_obj(t_new, ca, cl, cd, cca, ccl, ccd, aa)
        if np.any(new < obj[active] - 1e-9):
            raise NonMonotoneCCP(
                "upper-bound objective decreased by "
                f"{float((obj[active] - new).max())!r}")
        done = np.abs(new - obj[active]) <= cfg.ccp_tol * np.maximum(
            1.0, np.abs(new))
        t[active] = t_new
        obj[active] = new
        active = active[~done]
        if len(active) == 0:
            break
    return t, obj


# ---------------------------------------------------------------------------
# mu line search


def mu_line_search(nc_set, t, net: NetworkParams, content: ContentConfig,
                   cfg: OptimizerConfig = DEFAULT_CONFIG,
                   variant: str = "lower") -> float:
    """Maximize the chosen ASE bound over mu on its feasible interval."""
    hi = mu_interval_upper(net, len(nc_set), content.c2)
    if hi == 0.0:
        return 0.0

    def obj(mu):
        return _total_ase(nc_set, t, float(mu), net, content, variant)

    grid = np.linspace(0.0, hi, cfg.mu_grid)
    vals = np.array([obj(m) for m in grid])
    vmax, vmin = vals.max(), vals.min()
    if vmax - vmin <= 1e-12 * max(1.0, abs(vmax)):
        return 0.5 * hi  # flat objective: deterministic midpoint tie-break
    k = int(np.argmax(vals))
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, len(grid) - 1)]
    # golden-section refinement
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi_b - invphi * (hi_b - lo_b)
    x2 = lo_b + invphi * (hi_b - lo_b)
    f1, f2 = obj(x1), obj(x2)
    while hi_b - lo_b > cfg.golden_tol:
        if f1 < f2:
            lo_b, x1, f1 = x1, x2, f2
            x2 = lo_b + invphi * (hi_b - lo_b)
            f2 = obj(x2)
        else:
            hi_b, x2, f2 = x2, x1, f1
            x1 = hi_b - invphi * (hi_b - lo_b)
            f1 = obj(x1)
    cand = [(obj(0.5 * (lo_b + hi_b)), 0.5 * (lo_b + hi_b)),
            (float(vals[k]), float(grid[k]))]
    return max(cand)[1]


# ---------------------------------------------------------------------------
# Alternating optimization


def _alternate_impl(net, content, cfg, variant, solver, rng, mu0):
    mu = mu0 if mu0 is not None else min(1.0, math.sqrt(net.M2 / net.U2))
    warm = {} if solver == "ccp" else None
    nc, t, obj = discrete_enumerate(mu, net, content, cfg, solver=solver,
                                    rng=rng, warm_state=warm)
    trace = [obj]
    for _ in range(cfg.alt_max_iters):
        prev = obj
        mu_new = mu_line_search(nc, t, net, content, cfg, variant=variant)
        obj_mu = _total_ase(nc, t, mu_new, net, content, variant)
        if obj_mu >= obj:
            mu, obj = mu_new, obj_mu
        trace.append(obj)
        # only the first discrete pass uses the random restart init; later
        # passes warm-start from the previous pass's iterate
        nc_new, t_new, obj_d = discrete_enumerate(
            mu, net, content, cfg, solver=solver, rng=None, warm_state=warm)
        if obj_d >= obj:
            nc, t, obj = nc_new, t_new, obj_d
        trace.append(obj)
        if obj - prev <= cfg.alt_tol * max(1.0, abs(obj)):
            break
    return Solution(nc, np.asarray(t), float(mu), float(obj), tuple(trace))


def alternate(net: NetworkParams, content: ContentConfig,
              cfg: OptimizerConfig = DEFAULT_CONFIG,
              mu0: float | None = None) -> Solution:
    """Alternating cached-set/T/mu maximization of the ASE lower bound.

    With no explicit mu0 the alternation is restarted from several starting
    coefficients spanning the feasible interval and the best final objective
    wins: the alternation is a coordinate ascent and a single start can stall
    on a set whose best mu lies far from the start.
    """
    if mu0 is not None:
        return _alternate_impl(net, content, cfg, "lower", "kkt", None, mu0)
    hi = math.sqrt(net.M2 / net.U2)
    starts = {min(1.0, hi)} | {f * hi for f in (0.25, 0.5, 0.75, 1.0)}
    best = None
    for m0 in sorted(starts):
        sol = _alternate_impl(net, content, cfg, "lower", "kkt", None, m0)
        if best is None or sol.objective > best.objective:
            best = sol
    return best


def ccp_upper(net: NetworkParams, content: ContentConfig,
              cfg: OptimizerConfig = DEFAULT_CONFIG, seed: int = 0) -> Solution:
    """Best-of-restarts CCP maximization of the ASE upper bound."""
    best = None
    for r in range(cfg.ccp_restarts):
        rng = np.random.default_rng([seed, r])
        sol = _alternate_impl(net, content, cfg, "upper", "ccp", rng, None)
        if best is None or sol.objective > best.objective:
            best = sol
    return best


# ---------------------------------------------------------------------------
# Baselines


def baseline_mpc(net: NetworkParams, content: ContentConfig,
                 cfg: OptimizerConfig = DEFAULT_CONFIG) -> Solution:
    """Most-popular caching: deterministically cache the c2 most popular
    catalogue files at every SBS."""
    if len(content.n2_set) <= content.c2:
        raise InvalidParam("catalogue must exceed the SBS cache size")
    nc = tuple(content.n2_set[:content.c2])
    t = np.ones(content.c2)
    mu = mu_line_search(nc, t, net, content, cfg, variant="lower")
    obj = _total_ase(nc, t, mu, net, content, "lower")
    return Solution(nc, t, float(mu), float(obj), (float(obj),))


def baseline_udc(net: NetworkParams, content: ContentConfig,
                 cfg: OptimizerConfig = DEFAULT_CONFIG) -> Solution:
    """Uniform caching over the catalogue minus the cb least popular files
    (which are left to the backhaul)."""
    n_keep = len(content.n2_set) - content.cb
    if n_keep < content.c2:
        raise InvalidParam("catalogue minus backhaul files smaller than cache")
    nc = tuple(content.n2_set[:n_keep])
    t = np.full(n_keep, content.c2 / n_keep)
    mu = mu_line_search(nc, t, net, content, cfg, variant="lower")
    obj = _total_ase(nc, t, mu, net, content, "lower")
    return Solution(nc, t, float(mu), float(obj), (float(obj),))


# ---------------------------------------------------------------------------
# Projected-gradient oracle


def projected_gradient(nc_set, mu: float, net: NetworkParams,
                       content: ContentConfig, variant: str = "exact",
                       max_iters: int = 2000, tol: float = 1e-10,
                       t0: np.ndarray | None = None) -> np.ndarray:
    """Projected-gradient ascent on the chosen per-file objective; the
    objective is separable so gradients come from per-coordinate central
    differences.  Validation oracle for the KKT solver."""
    nc_set = tuple(nc_set)
    ctx = build_sbs_context(net, content.c2, len(nc_set), mu)
    a = np.array([content.pop(n) for n in nc_set])

    if variant == "exact":
        def psi(x):
            return analytics.psi2_exact_ctx(ctx, float(x))

        def value(t):
            return float(a @ [psi(x) for x in t])

        h = 1e-6

        def grad(t):
            return a * np.array(
                [(psi(min(x + h, 1.0)) - psi(max(x - h, 0.0)))
                 / (min(x + h, 1.0) - max(x - h, 0.0)) for x in t])
    elif variant == "lower":
        p, r1, r2 = _lower_terms(ctx)

        def value(t):
            return float(a @ _rational_value(np.asarray(t), p, r1, r2))

        def grad(t):
            return a * _rational_deriv(np.asarray(t), p, r1, r2)
    else:
        raise InvalidParam(f"unknown variant {variant!r}")

    t = (np.asarray(t0, dtype=float) if t0 is not None
         else np.full(len(nc_set), content.c2 / len(nc_set)))
    t = project_capped_simplex(t, float(content.c2))
    val = value(t)
    for _ in range(max_iters):
        g = grad(t)
        # stationarity check: the full projected step barely moves the point
        probe = project_capped_simplex(t + g, float(content.c2))
        if float(np.abs(probe - t).max()) <= tol:
            return t
        step = 1.0
        improved = False
        while step > 1e-14:
            cand = project_capped_simplex(t + step * g, float(content.c2))
            cval = value(cand)
            if cval >= val + 1e-4 * float(g @ (cand - t)) and cval >= val:
                improved = True
                break
            step *= 0.5
        if not improved:
            # finite-difference noise near the optimum: accept the iterate
            return t
        moved = float(np.abs(cand - t).max())
        t, val = cand, cval
        if moved <= tol:
            return t
    return t
