"""Stochastic-geometry Monte Carlo oracle.

Realizes the two-tier network end to end — Poisson layouts, per-SBS random
caches with exact marginals, content-centric association, backhaul retrieval,
the nulling request/grant protocol, and gamma-gain SIR draws — and estimates
the tier success probabilities, area spectral efficiency, and the empirical
distribution of nulling requests per SBS.

Success probabilities are estimated per file among *served* users in the
observation region and recombined with the exact popularity weights; this
matches the analytic decomposition and reduces variance.  Confidence
intervals are clustered by realization (delta method on the per-file ratio
estimators), so intra-realization correlation is handled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._accel import kernels as K
from ._proj import project_capped_simplex
from .errors import InfeasibleMarginals, InstanceTooLarge, InvalidParam
from .model import CachingPolicy, ContentConfig, NetworkParams

__all__ = [
    "SimConfig", "SimEstimate", "SimSweepResult", "CacheRealization",
    "sample_ppp", "realize_caches", "solve_pi_least_squares",
    "Realization", "ServiceTables", "GrantTable",
    "realize_network", "associate_and_serve", "in_protocol",
    "draw_sir_and_success", "estimate", "estimate_sweep",
]


@dataclass(frozen=True)
class SimConfig:
    window_side: float = 2000.0
    n_realizations: int = 50_000
    seed: int = 0
    observation_margin: float | None = None  # default: 25% of window side
    sir_sample_cap: int = 256  # sampled served users per tier per realization

    def __post_init__(self):
        if not self.window_side > 0:
            raise InvalidParam("window_side must be > 0")
        if self.n_realizations < 1:
            raise InvalidParam("n_realizations must be >= 1")
        if self.margin >= self.window_side / 2:
            raise InvalidParam("observation_margin must be < window_side/2")
        if self.sir_sample_cap < 1:
            raise InvalidParam("sir_sample_cap must be >= 1")

    @property
    def margin(self) -> float:
        if self.observation_margin is None:
            return 0.25 * self.window_side
        return self.observation_margin


@dataclass(frozen=True)
class SimEstimate:
    q1_hat: float
    q1_half_width: float
    q2_hat: float
    q2_half_width: float
    ase_hat: float
    ase_half_width: float
    theta_hist: dict
    n_effective: int
    n_dropped: int


@dataclass(frozen=True)
class SimSweepResult:
    """Estimates on a shared set of realizations across a threshold grid."""
    tau_grid: np.ndarray
    q1_hat: np.ndarray
    q1_half_width: np.ndarray
    q2_hat: np.ndarray
    q2_half_width: np.ndarray
    ase_hat: np.ndarray
    ase_half_width: np.ndarray
    theta_hist: dict
    n_effective: int
    n_dropped: int

    def at(self, t_index: int) -> SimEstimate:
        return SimEstimate(
            float(self.q1_hat[t_index]), float(self.q1_half_width[t_index]),
            float(self.q2_hat[t_index]), float(self.q2_half_width[t_index]),
            float(self.ase_hat[t_index]), float(self.ase_half_width[t_index]),
            self.theta_hist, self.n_effective, self.n_dropped)


@dataclass(frozen=True)
class CacheRealization:
    """Per-SBS cache contents: global 1-based file indices, one row per SBS."""
    files: np.ndarray  # (n_sbs, c2) int

    def __post_init__(self):
        f = np.asarray(self.files)
        if f.ndim != 2:
            raise InvalidParam("files must be a 2-D array")
        object.__setattr__(self, "files", f)


# ---------------------------------------------------------------------------
# Elementary sampling operations


def sample_ppp(density: float, window_side: float, rng) -> np.ndarray:
    """Homogeneous Poisson point process on [0, window_side]^2."""
    if density < 0:
        raise InvalidParam("density must be >= 0")
    n = rng.poisson(density * window_side * window_side)
    return rng.random((n, 2)) * window_side


def _cache_slots(n_sbs: int, t_vec: np.ndarray, c2: int, rng) -> np.ndarray:
    """Interval method: exactly c2 distinct files per SBS, marginals = T.

    The probabilities are laid as consecutive segments on a circle of length
    c2; a single uniform offset u selects the files whose segments contain
    u + k for k = 0..c2-1.  Since each segment has length <= 1, the c2 hits
    land in distinct segments.
    """
    cum = np.cumsum(t_vec)
    cum[-1] = c2  # exact top end
    u = rng.random(n_sbs)
    pos = u[:, None] + np.arange(c2)[None, :]
    return np.searchsorted(cum, pos, side="right").astype(np.int64)


def realize_caches(sbs_count: int, policy: CachingPolicy, rng) -> CacheRealization:
    t = policy.T
    c2 = int(round(float(t.sum())))
    if np.any(t > 1 + 1e-12):
        raise InfeasibleMarginals("cache marginals must satisfy T_n <= 1")
    if abs(float(t.sum()) - c2) > 1e-8 or c2 < 1:
        raise InfeasibleMarginals(
            f"sum(T) = {t.sum()!r} must be a positive integer (cache size)")
    slots = _cache_slots(sbs_count, t, c2, rng)
    files = np.asarray(policy.nc_set, dtype=np.int64)[slots]
    return CacheRealization(files)


def solve_pi_least_squares(policy: CachingPolicy, max_combos: int = 10_000):
    """Recover a probability vector over cache combinations whose marginal
    inclusion probabilities best match T (least squares on the marginals).

    Returns (combos, p): combos in lexicographic order over nc_set, p on the
    probability simplex (entries capped at 1).  Solved by projected gradient
    on the capped simplex.  Diagnostic only — the sampler itself uses the
    interval method.
    """
    t = policy.T
    c2 = int(round(float(t.sum())))
    if abs(float(t.sum()) - c2) > 1e-8 or c2 < 1:
        raise InfeasibleMarginals(f"sum(T) = {t.sum()!r} must be a positive integer")
    n_c = len(policy.nc_set)
    n_comb = math.comb(n_c, c2)
    if n_comb > max_combos:
        raise InstanceTooLarge(f"{n_comb} combinations exceed cap {max_combos}")
    combos = list(combinations(range(n_c), c2))
    a = np.zeros((n_c, n_comb))
    for i, comb in enumerate(combos):
        a[list(comb), i] = 1.0
    p = np.full(n_comb, 1.0 / n_comb)
    step = 1.0 / max(np.linalg.norm(a, 2) ** 2, 1e-12)
    for _ in range(20_000):
        grad = a.T @ (a @ p - t)
        p_new = project_capped_simplex(p - step * grad, total=1.0, cap=1.0)
        if np.max(np.abs(p_new - p)) < 1e-13:
            p = p_new
            break
        p = p_new
    named = [tuple(policy.nc_set[j] for j in comb) for comb in combos]
    return named, p


# ---------------------------------------------------------------------------
# One network realization


@dataclass
class Realization:
    mbs: np.ndarray
    sbs: np.ndarray
    users: np.ndarray
    req: np.ndarray          # 0-based global file index per user
    cls: np.ndarray          # 0 mbs-cached, 1 sbs, 2 backhaul, -1 dropped
    cache_slots: np.ndarray  # (n_sbs, c2) local index into nc_set
    nc_local: np.ndarray     # global 0-based file -> local index or -1


@dataclass
class ServiceTables:
    serving: np.ndarray      # tier-local BS index per user (-1 none)
    dist: np.ndarray
    served_sbs: np.ndarray   # bool per user
    served_mbs: np.ndarray   # bool per user
    bh_ok: np.ndarray        # backhaul file retrieved at serving MBS
    n_dropped: int


@dataclass
class GrantTable:
    theta: np.ndarray        # nulling requests received per SBS
    pair_user: np.ndarray    # global user index per request
    pair_sbs: np.ndarray
    granted: np.ndarray      # bool per request


def realize_network(net: NetworkParams, content: ContentConfig,
                    policy: CachingPolicy, sim: SimConfig, rng,
                    need_mbs: bool = True) -> Realization:
    side = sim.window_side
    if need_mbs:
        n_mbs = rng.poisson(net.lambda1 * side * side)
        mbs = rng.random((n_mbs, 2)) * side
    else:
        mbs = np.empty((0, 2))
    n_sbs = rng.poisson(net.lambda2 * side * side)
    sbs = rng.random((n_sbs, 2)) * side
    n_u = rng.poisson(net.lambda_u * side * side)
    users = rng.random((n_u, 2)) * side

    cdf = np.cumsum(content.popularity)
    cdf[-1] = 1.0
    req = np.searchsorted(cdf, rng.random(n_u), side="right").astype(np.int64)

    slots = _cache_slots(n_sbs, policy.T, content.c2, rng)

    nc_local = np.full(content.n_files, -1, dtype=np.int64)
    for j, nfile in enumerate(policy.nc_set):
        nc_local[nfile - 1] = j

    cls = np.full(n_u, 2, dtype=np.int8)
    cls[req < content.n1] = 0
    cls[nc_local[req] >= 0] = 1
    return Realization(mbs, sbs, users, req, cls, slots, nc_local)


def associate_and_serve(re: Realization, net: NetworkParams,
                        content: ContentConfig, policy: CachingPolicy,
                        sim: SimConfig, rng) -> ServiceTables:
    n_u = len(re.users)
    n_sbs = len(re.sbs)
    n_mbs = len(re.mbs)
    serving = np.full(n_u, -1, dtype=np.int64)
    dist = np.full(n_u, np.inf)
    dropped = 0
    n_c = policy.n_cached
    side = sim.window_side

    # --- SBS tier: nearest SBS caching the requested file
    if n_sbs > 0:
        flat = re.cache_slots.ravel()
        sbs_rep = np.repeat(np.arange(n_sbs), content.c2)
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=n_c)
        offs = np.concatenate([[0], np.cumsum(counts)])
        req_local = re.nc_local[re.req]
        for j in range(n_c):
            uj = np.nonzero((re.cls == 1) & (req_local == j))[0]
            if len(uj) == 0:
                continue
            holders = sbs_rep[order[offs[j]:offs[j + 1]]]
            if len(holders) == 0:
                dropped += len(uj)
                re.cls[uj] = -1
                continue
            index = K.build_index(re.sbs[holders], 0.0, side)
            li, d = K.query_nn(index, re.users[uj])
            serving[uj] = holders[li]
            dist[uj] = d
    else:
        n_lost = int(np.count_nonzero(re.cls == 1))
        dropped += n_lost
        re.cls[re.cls == 1] = -1

    # --- MBS tier: nearest MBS for cached-at-MBS and backhaul traffic
    mbs_users = np.nonzero((re.cls == 0) | (re.cls == 2))[0]
    if len(mbs_users):
        if n_mbs == 0:
            dropped += len(mbs_users)
            re.cls[mbs_users] = -1
        else:
            index = K.build_index(re.mbs, 0.0, side)
            mi, d = K.query_nn(index, re.users[mbs_users])
            serving[mbs_users] = mi
            dist[mbs_users] = d

    # --- scheduling: each BS uniformly picks U_k among its associated users
    # (user array order is an exchangeable random order, so "first U_k in
    # index order" is a uniform choice)
    gs = np.where(re.cls == 1, serving, -1)
    served_sbs = K.first_k_per_group(gs, max(n_sbs, 1), net.U2)
    gm = np.where((re.cls == 0) | (re.cls == 2), serving, -1)
    served_mbs = K.first_k_per_group(gm, max(n_mbs, 1), net.U1)

    # --- backhaul: each MBS retrieves at most cb distinct uncached files,
    # uniformly among the distinct files its associated users request
    bh_ok = np.zeros(n_u, dtype=bool)
    bh = np.nonzero(re.cls == 2)[0]
    if len(bh):
        keys = serving[bh] * content.n_files + re.req[bh]
        uniq = np.unique(keys)
        prio = rng.random(len(uniq))
        mbs_of = uniq // content.n_files
        o = np.lexsort((prio, mbs_of))
        so = mbs_of[o]
        first = np.searchsorted(so, so, side="left")
        rank = np.arange(len(uniq)) - first
        retrieved = np.zeros(len(uniq), dtype=bool)
        retrieved[o] = rank < content.cb
        bh_ok[bh] = retrieved[np.searchsorted(uniq, keys)]

    return ServiceTables(serving, dist, served_sbs, served_mbs, bh_ok, dropped)


def in_protocol(re: Realization, svc: ServiceTables, net: NetworkParams,
                policy: CachingPolicy, sim: SimConfig, rng) -> GrantTable:
    n_sbs = len(re.sbs)
    theta = np.zeros(max(n_sbs, 1), dtype=np.int64)
    empty = np.empty(0, dtype=np.int64)
    served = np.nonzero(svc.served_sbs)[0]
    if policy.mu <= 0 or len(served) == 0 or n_sbs <= 1:
        return GrantTable(theta[:n_sbs], empty, empty,
                          np.empty(0, dtype=bool))
    index = K.build_index(re.sbs, 0.0, sim.window_side)
    pu, pb = K.query_radius_pairs(index, re.users[served],
                                  policy.mu * svc.dist[served],
                                  svc.serving[served])
    # canonical order so both kernel backends consume the same priorities
    o = np.lexsort((pu, pb))
    pu, pb = pu[o], pb[o]
    theta = np.bincount(pb, minlength=n_sbs)
    delta = net.M2 - net.U2
    granted = np.zeros(len(pu), dtype=bool)
    if delta > 0 and len(pu):
        prio = rng.random(len(pu))
        o2 = np.lexsort((prio, pb))
        sb = pb[o2]
        first = np.searchsorted(sb, sb, side="left")
        rank = np.arange(len(pu)) - first
        granted[o2] = rank < delta
    return GrantTable(theta, served[pu], pb, granted)


def _null_csr(grants: GrantTable, sel: np.ndarray):
    """CSR lists of nulled SBS indices for the selected users."""
    if len(grants.pair_user) == 0 or len(sel) == 0:
        return np.zeros(len(sel) + 1, dtype=np.int64), np.empty(0, np.int64)
    gu = grants.pair_user[grants.granted]
    gb = grants.pair_sbs[grants.granted]
    o = np.argsort(gu, kind="stable")
    gu, gb = gu[o], gb[o]
    lo = np.searchsorted(gu, sel, side="left")
    hi = np.searchsorted(gu, sel, side="right")
    ptr = np.zeros(len(sel) + 1, dtype=np.int64)
    np.cumsum(hi - lo, out=ptr[1:])
    idx = np.empty(ptr[-1], dtype=np.int64)
    for i in range(len(sel)):
        idx[ptr[i]:ptr[i + 1]] = gb[lo[i]:hi[i]]
    return ptr, idx


def draw_sir_and_success(re: Realization, svc: ServiceTables,
                         grants: GrantTable, net: NetworkParams, rng,
                         tau_grid: np.ndarray,
                         sel_sbs: np.ndarray, sel_mbs: np.ndarray):
    """SIR draws and success indicators for the selected served users.

    Returns (succ_sbs, succ_mbs_radio): boolean arrays (len(sel), len(tau)).
    Backhaul retrieval is *not* folded in here; callers combine it.
    """
    delta = net.M2 - net.U2
    succ_s = np.zeros((len(sel_sbs), len(tau_grid)), dtype=bool)
    succ_m = np.zeros((len(sel_mbs), len(tau_grid)), dtype=bool)

    # Full-load model: every base station transmits U_k streams, so each
    # interferer contributes a Gamma(U_k, 1) effective gain.
    if len(sel_sbs):
        theta_serv = grants.theta[svc.serving[sel_sbs]]
        d_ord = delta + 1 - np.minimum(theta_serv, delta)
        g0 = rng.standard_gamma(d_ord.astype(np.float64))
        gains = rng.standard_gamma(float(net.U2), len(re.sbs))
        ptr, nidx = _null_csr(grants, sel_sbs)
        inter = K.interference(re.sbs, gains, re.users[sel_sbs],
                               svc.serving[sel_sbs], ptr, nidx, net.alpha2)
        with np.errstate(divide="ignore"):
            sir = g0 * svc.dist[sel_sbs] ** (-net.alpha2) / inter
        sir[inter == 0.0] = np.inf
        succ_s = sir[:, None] >= tau_grid[None, :]

    if len(sel_mbs):
        g0 = rng.standard_exponential(len(sel_mbs))  # M1-U1+1 = 1 signal order
        gains = rng.standard_gamma(float(net.U1), len(re.mbs))
        ptr = np.zeros(len(sel_mbs) + 1, dtype=np.int64)
        inter = K.interference(re.mbs, gains, re.users[sel_mbs],
                               svc.serving[sel_mbs], ptr,
                               np.empty(0, np.int64), net.alpha1)
        with np.errstate(divide="ignore"):
            sir = g0 * svc.dist[sel_mbs] ** (-net.alpha1) / inter
        sir[inter == 0.0] = np.inf
        succ_m = sir[:, None] >= tau_grid[None, :]

    return succ_s, succ_m


# ---------------------------------------------------------------------------
# Aggregation


def _run_block(net, content, policy, sim, r0, r1, tau_grid, need_mbs,
               need_sir, collect_theta):
    """Realizations r0..r1-1; returns per-realization count/success arrays."""
    n_c = policy.n_cached
    nb_files = sorted(set(content.n2_set) - set(policy.nc_set))
    nb_map = {f: i + 1 for i, f in enumerate(nb_files)}  # row 0 = cached class
    n_rows_m = 1 + len(nb_files)
    n_t = len(tau_grid)
    n_r = r1 - r0
    s_succ = np.zeros((n_r, n_c, n_t), dtype=np.uint16)
    s_cnt = np.zeros((n_r, n_c), dtype=np.uint16)
    m_succ = np.zeros((n_r, n_rows_m, n_t), dtype=np.uint16)
    m_cnt = np.zeros((n_r, n_rows_m), dtype=np.uint16)
    theta_counts = np.zeros(64, dtype=np.int64)
    n_eff = 0
    n_drop = 0
    margin = sim.margin
    hi = sim.window_side - margin

    for r in range(r0, r1):
        rng = np.random.default_rng([sim.seed, r])
        re = realize_network(net, content, policy, sim, rng, need_mbs=need_mbs)
        svc = associate_and_serve(re, net, content, policy, sim, rng)
        grants = in_protocol(re, svc, net, policy, sim, rng)
        n_drop += svc.n_dropped
        i = r - r0

        if collect_theta and len(re.sbs):
            obs = ((re.sbs[:, 0] >= margin) & (re.sbs[:, 0] < hi)
                   & (re.sbs[:, 1] >= margin) & (re.sbs[:, 1] < hi))
            th = grants.theta[obs]
            if len(th):
                mx = int(th.max())
                if mx >= len(theta_counts):
                    grown = np.zeros(2 * (mx + 1), dtype=np.int64)
                    grown[:len(theta_counts)] = theta_counts
                    theta_counts = grown
                theta_counts[:mx + 1] += np.bincount(th, minlength=mx + 1)

        if not need_sir:
            continue

        uob = ((re.users[:, 0] >= margin) & (re.users[:, 0] < hi)
               & (re.users[:, 1] >= margin) & (re.users[:, 1] < hi))

        cand_s = np.nonzero(svc.served_sbs & uob)[0]
        sel_s = cand_s[rng.permutation(len(cand_s))[:sim.sir_sample_cap]]
        if need_mbs:
            cand_m = np.nonzero(svc.served_mbs & uob)[0]
            sel_m = cand_m[rng.permutation(len(cand_m))[:sim.sir_sample_cap]]
        else:
            sel_m = np.empty(0, dtype=np.int64)

        succ_s, succ_m = draw_sir_and_success(
            re, svc, grants, net, rng, tau_grid, sel_s, sel_m)
        n_eff += len(sel_s) + len(sel_m)

        if len(sel_s):
            rows = re.nc_local[re.req[sel_s]]
            s_cnt[i] = np.bincount(rows, minlength=n_c)
            tmp = np.zeros((n_c, n_t), dtype=np.int64)
            np.add.at(tmp, rows, succ_s.astype(np.int64))
            s_succ[i] = tmp
        if len(sel_m):
            ok = np.where(re.cls[sel_m] == 0, True, svc.bh_ok[sel_m])
            final = succ_m & ok[:, None]
            rows = np.where(re.cls[sel_m] == 0, 0,
                            [nb_map.get(int(f) + 1, 0) for f in re.req[sel_m]])
            m_cnt[i] = np.bincount(rows, minlength=n_rows_m)
            tmp = np.zeros((n_rows_m, n_t), dtype=np.int64)
            np.add.at(tmp, rows, final.astype(np.int64))
            m_succ[i] = tmp

    return s_succ, s_cnt, m_succ, m_cnt, theta_counts, n_eff, n_drop


def _block_worker(args):
    return _run_block(*args)


def _ratio_and_ci(succ, cnt, weights):
    """Weighted per-row ratio estimator with clustered (delta-method) CI.

    succ: (R, rows, T), cnt: (R, rows), weights: (rows,).
    Returns (estimate (T,), half_width (T,), influence (R, T)).
    """
    n_r, n_rows, n_t = succ.shape
    s_tot = succ.sum(axis=0, dtype=np.float64)          # (rows, T)
    c_tot = cnt.sum(axis=0, dtype=np.float64)           # (rows,)
    seen = c_tot > 0
    ratio = np.zeros((n_rows, n_t))
    if np.any(seen):
        ratio[seen] = s_tot[seen] / c_tot[seen, None]
        if not np.all(seen):
            # unobserved rows: substitute the weighted mean of observed rows
            w_seen = weights[seen]
            fallback = (w_seen[:, None] * ratio[seen]).sum(0) / max(
                w_seen.sum(), 1e-300)
            ratio[~seen] = fallback
    est = (weights[:, None] * ratio).sum(axis=0)
    # influence of realization r: sum_n w_n (s_rn - ratio_n * c_rn) / C_n
    inv_c = np.where(seen, 1.0 / np.maximum(c_tot, 1.0), 0.0)
    resid = succ.astype(np.float64) - ratio[None, :, :] * cnt[:, :, None]
    infl = np.einsum("n,rnt,n->rt", weights, resid, inv_c)
    half = 1.96 * np.sqrt((infl ** 2).sum(axis=0))
    return est, half, infl


def estimate_sweep(net: NetworkParams, content: ContentConfig,
                   policy: CachingPolicy, sim: SimConfig,
                   tau_grid=None, need_mbs: bool = True,
                   need_sir: bool = True, collect_theta: bool = True,
                   jobs: int = 1) -> SimSweepResult:
    policy.validate(content)
    if tau_grid is None:
        tau_grid = np.array([net.tau])
    tau_grid = np.asarray(tau_grid, dtype=float)

    n_r = sim.n_realizations
    if jobs > 1 and n_r > 1:
        from concurrent.futures import ProcessPoolExecutor
        bounds = np.linspace(0, n_r, jobs + 1).astype(int)
        args = [(net, content, policy, sim, int(a), int(b), tau_grid,
                 need_mbs, need_sir, collect_theta)
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_block_worker, args))
        s_succ = np.concatenate([p[0] for p in parts])
        s_cnt = np.concatenate([p[1] for p in parts])
        m_succ = np.concatenate([p[2] for p in parts])
        m_cnt = np.concatenate([p[3] for p in parts])
        tlen = max(len(p[4]) for p in parts)
        theta_counts = np.zeros(tlen, dtype=np.int64)
        for p in parts:
            theta_counts[:len(p[4])] += p[4]
        n_eff = sum(p[5] for p in parts)
        n_drop = sum(p[6] for p in parts)
    else:
        (s_succ, s_cnt, m_succ, m_cnt, theta_counts, n_eff,
         n_drop) = _run_block(net, content, policy, sim, 0, n_r, tau_grid,
                              need_mbs, need_sir, collect_theta)

    # weights: exact popularity masses per estimator row
    a = content.popularity
    w_s = np.array([content.pop(n) for n in policy.nc_set])
    nb_files = sorted(set(content.n2_set) - set(policy.nc_set))
    w_m = np.array([a[:content.n1].sum()] + [content.pop(n) for n in nb_files])

    q2, q2h, infl2 = _ratio_and_ci(s_succ, s_cnt, w_s)
    q1, q1h, infl1 = _ratio_and_ci(m_succ, m_cnt, w_m)

    rate = np.log2(1.0 + tau_grid)
    ase = rate * (net.lambda1 * net.U1 * q1 + net.lambda2 * net.U2 * q2)
    infl_a = rate[None, :] * (net.lambda1 * net.U1 * infl1
                              + net.lambda2 * net.U2 * infl2)
    ase_h = 1.96 * np.sqrt((infl_a ** 2).sum(axis=0))

    total = theta_counts.sum()
    if total > 0:
        hist = {int(t): float(c) / total
                for t, c in enumerate(theta_counts) if c > 0}
    else:
        hist = {}
    return SimSweepResult(tau_grid, q1, q1h, q2, q2h, ase, ase_h, hist,
                          int(n_eff), int(n_drop))


def estimate(net: NetworkParams, content: ContentConfig,
             policy: CachingPolicy, sim: SimConfig,
             jobs: int = 1) -> SimEstimate:
    """Full Monte Carlo estimate at the configured threshold."""
    res = estimate_sweep(net, content, policy, sim, jobs=jobs)
    return res.at(0)
