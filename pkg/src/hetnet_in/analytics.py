"""Closed-form success probabilities and area spectral efficiency.

The SBS-tier conditional success probability is evaluated three ways:
  * exact     — forward recurrence on a lower-triangular Toeplitz system
                (power-series coefficients of the interference Laplace
                transform), O(D^2) per evaluation;
  * lower     — rational bound obtained by bounding the L1 norm of the
                Toeplitz inverse, used as the optimizer's inner objective;
  * upper     — alternating binomial bound from the incomplete-gamma
                inequality (1 - e^(-beta*x))^D <= P(D, x).

A ``SbsContext`` caches everything that depends on (net, c2, n_cached, mu)
but not on the per-file caching probability T_n, so optimizer inner loops pay
only array arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun as sf
from .errors import DegenerateInput, InvalidParam
from .model import AnalyticReport, CachingPolicy, ContentConfig, NetworkParams

__all__ = [
    "psi1", "q1", "mean_theta", "theta_pmf", "in_miss_prob",
    "toeplitz_coeffs", "psi2_exact", "psi2_special", "psi2_lower",
    "psi2_upper", "q2", "ase", "ase_split", "report", "SbsContext",
    "build_sbs_context",
]

_CLAMP_TOL = 1e-9


def _clamp_prob(x: float, name: str) -> float:
    if x < -_CLAMP_TOL or x > 1.0 + _CLAMP_TOL:
        raise InvalidParam(f"{name} = {x!r} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, x))


# ---------------------------------------------------------------------------
# Nulling-request statistics


def mean_theta(n_cached: int, c2: int, u2: int, mu: float) -> float:
    """Mean number of nulling requests received by an SBS."""
    if not (n_cached >= c2 >= 1):
        raise InvalidParam(f"need n_cached >= c2 >= 1, got {n_cached}, {c2}")
    if u2 < 1:
        raise InvalidParam(f"u2 must be >= 1, got {u2}")
    if mu < 0:
        raise InvalidParam(f"mu must be >= 0, got {mu}")
    tb = n_cached * u2 * mu * mu / c2 - min(mu * mu, 1.0) * u2
    # Guaranteed >= 0 since n_cached >= c2; guard float dust.
    return max(0.0, tb)


def theta_pmf(theta: int, theta_bar: float) -> float:
    """Poisson PMF at ``theta`` with mean ``theta_bar`` (log-space)."""
    if theta < 0:
        raise InvalidParam(f"theta must be >= 0, got {theta}")
    if theta_bar < 0:
        raise InvalidParam(f"theta_bar must be >= 0, got {theta_bar}")
    if theta_bar == 0.0:
        return 1.0 if theta == 0 else 0.0
    return math.exp(theta * math.log(theta_bar) - theta_bar
                    - math.lgamma(theta + 1.0))


def in_miss_prob(m2: int, u2: int, theta_bar: float) -> float:
    """Probability a nulling request is denied for lack of spare antennas.

    Sum over theta0 >= m2-u2 of (theta0+1-(m2-u2))/(theta0+1) * pmf(theta0),
    truncated once the residual Poisson tail mass drops below 1e-12 (hard cap
    10*(theta_bar+m2) terms).
    """
    if not (m2 >= u2 >= 1):
        raise InvalidParam(f"need m2 >= u2 >= 1, got {m2}, {u2}")
    if m2 == u2:
        return 1.0
    if theta_bar == 0.0:
        return 0.0
    delta = m2 - u2
    cap = int(10 * (theta_bar + m2)) + 1
    acc = 0.0
    cdf = 0.0
    for t0 in range(cap):
        p = theta_pmf(t0, theta_bar)
        cdf += p
        if t0 >= delta:
            acc += (t0 + 1 - delta) / (t0 + 1) * p
            if 1.0 - cdf < 1e-12:
                break
    return _clamp_prob(acc, "epsilon")


# ---------------------------------------------------------------------------
# MBS tier


def psi1(net: NetworkParams) -> float:
    """Conditional success probability of a served MBS-tier user."""
    f1 = sf.capital_f(net.tau, net.U1, net.alpha1)
    return _clamp_prob(1.0 / (1.0 + f1), "psi1")


def q1(net: NetworkParams, content: ContentConfig, policy: CachingPolicy) -> float:
    """MBS-tier success probability (MBS-cached plus backhaul traffic)."""
    a = content.popularity
    mass_n1 = float(a[:content.n1].sum())
    nb = sorted(set(content.n2_set) - set(policy.nc_set))
    if nb:
        xi = min(1.0, content.cb / len(nb))
        mass_b = float(sum(content.pop(n) for n in nb)) * xi
    else:
        mass_b = 0.0
    return _clamp_prob((mass_n1 + mass_b) * psi1(net), "q1")


# ---------------------------------------------------------------------------
# SBS tier: T_n-independent context


@dataclass(frozen=True)
class SbsContext:
    """Everything (net, c2, n_cached, mu)-dependent but T_n-independent.

    The interference Laplace exponent at threshold x is affine in T_n:
    w0(x; T_n) = w0_const(x) + w0_lin(x) * T_n, and likewise each series
    coefficient w_m at the base threshold.  All bounds below are expressed
    through these splits.
    """

    net: NetworkParams
    c2: int
    n_cached: int
    mu: float
    delta: int                 # spare antennas m2 - u2
    theta_bar: float
    eps: float
    p_theta: np.ndarray        # pmf at theta = 0..delta-1
    p_tail: float              # P[Theta >= delta] (1.0 when delta == 0)
    w0_const: float            # w0 split at base threshold tau
    w0_lin: float
    wm_const: np.ndarray       # index m-1 -> coefficient for m = 1..delta
    wm_lin: np.ndarray
    rho1: np.ndarray           # per theta: T_n coefficient of the bound denom
    rho2: np.ndarray           # per theta: constant part of the bound denom
    up_lin: tuple              # per theta: array over i = 1..D of T_n coeffs
    up_const: tuple            # per theta: array over i of constants
    up_coef: tuple             # per theta: (-1)^(i+1) * binom(D, i)
    ase2_scale: float          # lambda2 * U2 * log2(1 + tau)


def _w0_split(net: NetworkParams, mu: float, eps: float, thr: float):
    """(const, lin) of the Laplace exponent w0 at threshold ``thr``."""
    u2, a2 = net.U2, net.alpha2
    g = sf.capital_g(thr, u2, a2)
    f2 = sf.capital_f(thr, u2, a2)
    if mu == 0.0:
        scaled = g  # limit of mu^2 * F(thr / mu^alpha) as mu -> 0
    else:
        scaled = mu * mu * sf.capital_f(thr / mu ** a2, u2, a2)
    const = eps * g + (1.0 - eps) * scaled
    if mu < 1.0:
        lin = f2 - const
    else:
        lin = eps * (f2 - g)
    return const, lin


@lru_cache(maxsize=4096)
def _build_sbs_context_cached(net: NetworkParams, c2: int, n_cached: int,
                              mu: float) -> SbsContext:
    u2, a2, tau = net.U2, net.alpha2, net.tau
    delta = net.M2 - net.U2
    tb = mean_theta(n_cached, c2, u2, mu)
    eps = in_miss_prob(net.M2, net.U2, tb)
    p_theta = np.array([theta_pmf(t, tb) for t in range(delta)])
    p_tail = sf.lower_inc_gamma_reg(delta, tb) if delta > 0 and tb > 0 else (
        1.0 if delta == 0 else 0.0)

    w0c, w0l = _w0_split(net, mu, eps, tau)

    r = 2.0 / a2
    wm_const = np.zeros(delta)
    wm_lin = np.zeros(delta)
    poch = 1.0   # (U2)_m / m! running product
    for m in range(1, delta + 1):
        poch *= (u2 + m - 1) / m
        cm = 2.0 * poch
        bt = tau ** r / a2 * sf.beta(m - r, u2 + r)
        ft = sf.f_tilde(tau, m, u2, a2)
        if mu == 0.0:
            scaled = bt
        else:
            scaled = mu * mu * sf.f_tilde(tau / mu ** a2, m, u2, a2)
        const = cm * (eps * bt + (1.0 - eps) * scaled)
        if mu < 1.0:
            lin = cm * ft - const
        else:
            lin = cm * eps * (ft - bt)
        wm_const[m - 1] = const
        wm_lin[m - 1] = lin

    # Rational lower-bound denominators: T_n + w0 - sum_m (1 - m/D) w_m,
    # split into (rho1 * T_n + rho2) per theta term.
    rho1 = np.zeros(delta)
    rho2 = np.zeros(delta)
    up_lin, up_const, up_coef = [], [], []
    for theta in range(delta):
        d = delta + 1 - theta
        ms = np.arange(1, d)
        weights = 1.0 - ms / d
        rho1[theta] = 1.0 + w0l - float(weights @ wm_lin[:d - 1])
        rho2[theta] = w0c - float(weights @ wm_const[:d - 1])
        # Alternating binomial upper bound at scaled thresholds i*beta*tau.
        beta = math.exp(-math.lgamma(d + 1.0) / d)
        lin_i = np.empty(d)
        const_i = np.empty(d)
        coef_i = np.empty(d)
        for i in range(1, d + 1):
            ci, li = _w0_split(net, mu, eps, i * beta * tau)
            lin_i[i - 1] = 1.0 + li
            const_i[i - 1] = ci
            coef_i[i - 1] = (-1.0) ** (i + 1) * math.comb(d, i)
        up_lin.append(lin_i)
        up_const.append(const_i)
        up_coef.append(coef_i)

    scale = net.lambda2 * net.U2 * math.log2(1.0 + tau)
    return SbsContext(net, c2, n_cached, mu, delta, tb, eps, p_theta, p_tail,
                      w0c, w0l, wm_const, wm_lin, rho1, rho2,
                      tuple(up_lin), tuple(up_const), tuple(up_coef), scale)


def build_sbs_context(net: NetworkParams, c2: int, n_cached: int,
                      mu: float) -> SbsContext:
    if n_cached < c2:
        raise InvalidParam(f"need n_cached >= c2, got {n_cached} < {c2}")
    return _build_sbs_context_cached(net, int(c2), int(n_cached), float(mu))


# ---------------------------------------------------------------------------
# SBS tier: conditional success probability variants


def toeplitz_coeffs(t_n: float, w0: float, w: np.ndarray, d2: int) -> np.ndarray:
    """First column of the inverse of the lower-triangular Toeplitz system,
    scaled by T_n: forward substitution q_0 = T_n/(T_n+w0),
    q_m = sum_{k=1..m} w_k q_{m-k} / (T_n + w0)."""
    if d2 < 1:
        raise InvalidParam(f"d2 must be >= 1, got {d2}")
    w = np.asarray(w, dtype=float)
    if w.shape[0] < d2 - 1:
        raise InvalidParam(f"w must have length >= {d2 - 1}")
    den = t_n + w0
    if den <= 0:
        raise DegenerateInput(f"t_n + w0 = {den!r} must be positive")
    q = np.empty(d2)
    q[0] = t_n / den
    for m in range(1, d2):
        q[m] = float(w[:m][::-1] @ q[:m]) / den
    return q


def psi2_exact_ctx(ctx: SbsContext, t_n: float) -> float:
    """Exact conditional success probability via the Toeplitz recurrence."""
    if t_n == 0.0:
        return 0.0
    w0 = ctx.w0_const + ctx.w0_lin * t_n
    tail = t_n / (t_n + w0)
    if ctx.delta == 0:
        return _clamp_prob(ctx.p_tail * tail, "psi2")
    wm = ctx.wm_const + ctx.wm_lin * t_n
    q = toeplitz_coeffs(t_n, w0, wm, ctx.delta + 1)
    cums = np.cumsum(q)
    # theta-th term uses D2 = delta + 1 - theta leading coefficients.
    acc = float(ctx.p_theta @ cums[ctx.delta - np.arange(ctx.delta)])
    return _clamp_prob(acc + ctx.p_tail * tail, "psi2")


def psi2_lower_ctx(ctx: SbsContext, t_n) -> np.ndarray | float:
    """Rational lower bound, vectorized over t_n."""
    t = np.asarray(t_n, dtype=float)
    tail = ctx.p_tail * t / ((1.0 + ctx.w0_lin) * t + ctx.w0_const)
    if ctx.delta:
        body = (ctx.p_theta * t[..., None]
                / (ctx.rho1 * t[..., None] + ctx.rho2)).sum(axis=-1)
    else:
        body = 0.0
    out = np.where(t == 0.0, 0.0, body + tail)
    return float(out) if np.isscalar(t_n) or out.ndim == 0 else out


def psi2_upper_ctx(ctx: SbsContext, t_n) -> np.ndarray | float:
    """Alternating binomial upper bound, vectorized over t_n."""
    t = np.asarray(t_n, dtype=float)
    acc = ctx.p_tail * t / ((1.0 + ctx.w0_lin) * t + ctx.w0_const)
    for theta in range(ctx.delta):
        terms = (ctx.up_coef[theta] * t[..., None]
                 / (ctx.up_lin[theta] * t[..., None] + ctx.up_const[theta]))
        acc = acc + ctx.p_theta[theta] * terms.sum(axis=-1)
    out = np.where(t == 0.0, 0.0, acc)
    return float(out) if np.isscalar(t_n) or out.ndim == 0 else out


def psi2_exact(t_n: float, n_cached: int, mu: float, net: NetworkParams,
               c2: int) -> float:
    ctx = build_sbs_context(net, c2, n_cached, mu)
    return psi2_exact_ctx(ctx, t_n)


def psi2_lower(t_n: float, n_cached: int, mu: float, net: NetworkParams,
               c2: int) -> float:
    ctx = build_sbs_context(net, c2, n_cached, mu)
    return _clamp_prob(float(psi2_lower_ctx(ctx, t_n)), "psi2_lower")


def psi2_upper(t_n: float, n_cached: int, mu: float, net: NetworkParams,
               c2: int) -> float:
    ctx = build_sbs_context(net, c2, n_cached, mu)
    return _clamp_prob(float(psi2_upper_ctx(ctx, t_n)), "psi2_upper")


def psi2_special(t_n: float, net: NetworkParams) -> float:
    """No-spare-antenna case (U2 = M2); independent of mu."""
    if net.U2 != net.M2:
        raise InvalidParam("psi2_special requires U2 == M2")
    if t_n == 0.0:
        return 0.0
    g = sf.capital_g(net.tau, net.U2, net.alpha2)
    f2 = sf.capital_f(net.tau, net.U2, net.alpha2)
    return _clamp_prob(t_n / ((1.0 - g + f2) * t_n + g), "psi2_special")


# ---------------------------------------------------------------------------
# Aggregates


def q2(net: NetworkParams, content: ContentConfig, policy: CachingPolicy,
       variant: str = "exact") -> float:
    """SBS-tier success probability sum a_n * psi2(T_n) over the cached set."""
    policy.validate(content)
    ctx = build_sbs_context(net, content.c2, policy.n_cached, policy.mu)
    a = np.array([content.pop(n) for n in policy.nc_set])
    if variant == "exact":
        vals = np.array([psi2_exact_ctx(ctx, t) for t in policy.T])
    elif variant == "lower":
        vals = psi2_lower_ctx(ctx, policy.T)
    elif variant == "upper":
        vals = psi2_upper_ctx(ctx, policy.T)
    else:
        raise InvalidParam(f"unknown variant {variant!r}")
    return _clamp_prob(float(a @ vals), "q2")


def ase_split(net: NetworkParams, content: ContentConfig,
              policy: CachingPolicy, variant: str = "exact"):
    """Per-tier area spectral efficiency (bits/s/Hz/m^2)."""
    rate = math.log2(1.0 + net.tau)
    a1 = rate * net.lambda1 * net.U1 * q1(net, content, policy)
    a2 = rate * net.lambda2 * net.U2 * q2(net, content, policy, variant)
    return a1, a2


def ase(net: NetworkParams, content: ContentConfig, policy: CachingPolicy,
        variant: str = "exact") -> float:
    a1, a2 = ase_split(net, content, policy, variant)
    return a1 + a2


def report(net: NetworkParams, content: ContentConfig,
           policy: CachingPolicy) -> AnalyticReport:
    ctx = build_sbs_context(net, content.c2, policy.n_cached, policy.mu)
    q1v = q1(net, content, policy)
    q2v = q2(net, content, policy, "exact")
    return AnalyticReport(
        q1=q1v,
        q2=q2v,
        ase=ase(net, content, policy, "exact"),
        ase_lower=ase(net, content, policy, "lower"),
        ase_upper=ase(net, content, policy, "upper"),
        theta_bar=ctx.theta_bar,
        epsilon=ctx.eps,
        psi1=psi1(net),
    )
