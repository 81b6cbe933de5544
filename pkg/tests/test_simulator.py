"""Monte Carlo layer tests: point-process sampling, cache realization,
association/scheduling bookkeeping, nulling-request accounting, estimator
determinism and confidence-interval behaviour.

Oracles: brute-force nearest-neighbour / radius recounts with plain numpy,
exact combinatorial identities for the cache-combination distribution, and
statistical checks with 3-sigma style tolerances.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from hetnet_in import simulator as S
from hetnet_in.errors import (InfeasibleMarginals, InstanceTooLarge,
                              InvalidParam)
from hetnet_in.model import CachingPolicy, ContentConfig, NetworkParams


def make_net(**kw):
    base = dict(lambda1=1e-4, lambda2=5e-4, lambda_u=0.01, M1=8, M2=6, U1=8,
                U2=2, alpha1=4.0, alpha2=4.0, tau=1.0)
    base.update(kw)
    return NetworkParams(**base)


CONTENT = ContentConfig.from_zipf(12, 0.8, 4, 3, 2)
POLICY = CachingPolicy((5, 6, 7, 8), np.array([0.9, 0.8, 0.7, 0.6]), 1.4)


# ---------------------------------------------------------------------------
# Elementary sampling


def test_sample_ppp_counts_and_uniformity():
    rng = np.random.default_rng(0)
    side = 1000.0
    lam = 2e-4
    counts = []
    quad = np.zeros(4)
    for _ in range(400):
        pts = S.sample_ppp(lam, side, rng)
        counts.append(len(pts))
        qx = (pts[:, 0] >= side / 2).astype(int)
        qy = (pts[:, 1] >= side / 2).astype(int)
        np.add.at(quad, 2 * qx + qy, 1)
    mean = lam * side * side  # 200
    n = np.sum(counts)
    # Poisson mean and variance, each within ~4 sigma
    assert abs(np.mean(counts) - mean) < 4 * np.sqrt(mean / 400)
    assert abs(np.var(counts) / mean - 1) < 0.2
    # quadrants equally loaded (chi^2 with 3 dof, generous cut)
    chi2 = np.sum((quad - n / 4) ** 2 / (n / 4))
    assert chi2 < 20
    assert pts.min() >= 0 and pts.max() <= side


def test_sample_ppp_rejects_negative_density():
    with pytest.raises(InvalidParam):
        S.sample_ppp(-1.0, 100.0, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# Cache realization


def test_realize_caches_marginals_and_distinctness():
    rng = np.random.default_rng(1)
    n = 100_000
    cr = S.realize_caches(n, POLICY, rng)
    assert cr.files.shape == (n, CONTENT.c2)
    # exactly c2 distinct files per SBS, all from the cached set
    assert all(len(set(row)) == CONTENT.c2 for row in cr.files[:500])
    assert set(cr.files.ravel()) <= set(POLICY.nc_set)
    for j, f in enumerate(POLICY.nc_set):
        t_hat = np.mean(np.any(cr.files == f, axis=1))
        t = POLICY.T[j]
        sigma = np.sqrt(t * (1 - t) / n)
        assert abs(t_hat - t) < 4 * sigma


def test_realize_caches_infeasible_marginals():
    bad = CachingPolicy((5, 6, 7), np.array([0.9, 0.8, 0.7]), 1.0)
    with pytest.raises(InfeasibleMarginals):
        S.realize_caches(10, bad, np.random.default_rng(0))


def test_cache_slot_pair_correlations():
    # interval method: adjacent files in the layout are negatively
    # correlated; every pair probability must lie in [max(0,Ti+Tj-1), min]
    rng = np.random.default_rng(2)
    n = 100_000
    cr = S.realize_caches(n, POLICY, rng)
    has = np.stack([np.any(cr.files == f, axis=1) for f in POLICY.nc_set])
    for i in range(4):
        for j in range(i + 1, 4):
            pij = np.mean(has[i] & has[j])
            lo = max(0.0, POLICY.T[i] + POLICY.T[j] - 1)
            hi = min(POLICY.T[i], POLICY.T[j])
            assert lo - 0.01 <= pij <= hi + 0.01


# ---------------------------------------------------------------------------
# Combination-distribution recovery (diagnostic solver)


def test_solve_pi_least_squares_exact_case():
    # with |set| = c2 + 1 the combination distribution is unique:
    # P(missing file n) = 1 - T_n
    combos, p = S.solve_pi_least_squares(POLICY)
    assert combos == [(5, 6, 7), (5, 6, 8), (5, 7, 8), (6, 7, 8)]
    expect = {(6, 7, 8): 0.1, (5, 7, 8): 0.2, (5, 6, 8): 0.3, (5, 6, 7): 0.4}
    for c, pi in zip(combos, p):
        assert pi == pytest.approx(expect[c], abs=1e-6)
    assert p.sum() == pytest.approx(1.0, abs=1e-9)


def test_solve_pi_least_squares_marginal_consistency():
    pol = CachingPolicy(tuple(range(5, 11)),
                        np.array([0.7, 0.6, 0.5, 0.45, 0.4, 0.35]), 1.0)
    combos, p = S.solve_pi_least_squares(pol)
    marg = np.zeros(6)
    for c, pi in zip(combos, p):
        for f in c:
            marg[f - 5] += pi
    assert np.allclose(marg, pol.T, atol=1e-6)


def test_solve_pi_least_squares_too_large():
    pol = CachingPolicy(tuple(range(5, 45)), np.full(40, 20 / 40.0), 1.0)
    with pytest.raises(InstanceTooLarge):
        S.solve_pi_least_squares(pol)


# ---------------------------------------------------------------------------
# Brute-force recount of one realization


def _one_realization(seed=11, mu=1.4):
    net = make_net()
    pol = CachingPolicy(POLICY.nc_set, POLICY.T, mu)
    sim = S.SimConfig(window_side=1500.0, n_realizations=1, seed=seed)
    rng = np.random.default_rng([seed, 0])
    re = S.realize_network(net, CONTENT, pol, sim, rng)
    svc = S.associate_and_serve(re, net, CONTENT, pol, sim, rng)
    grants = S.in_protocol(re, svc, net, pol, sim, rng)
    return net, pol, sim, re, svc, grants


def test_association_matches_brute_force():
    net, pol, sim, re, svc, grants = _one_realization()
    nc = np.asarray(pol.nc_set)
    for u in range(len(re.users)):
        if re.cls[u] == 1:
            f = re.req[u] + 1
            holders = np.nonzero(np.any(nc[re.cache_slots] == f, axis=1))[0]
            d = np.hypot(*(re.sbs[holders] - re.users[u]).T)
            best = holders[np.argmin(d)]
            assert svc.serving[u] == best
            assert svc.dist[u] == pytest.approx(d.min(), rel=1e-12)
        elif re.cls[u] in (0, 2):
            d = np.hypot(*(re.mbs - re.users[u]).T)
            assert svc.serving[u] == np.argmin(d)
            assert svc.dist[u] == pytest.approx(d.min(), rel=1e-12)


def test_request_classes_partition_users():
    net, pol, sim, re, svc, grants = _one_realization()
    for u in range(len(re.users)):
        f = re.req[u] + 1
        if f <= CONTENT.n1:
            assert re.cls[u] == 0
        elif f in pol.nc_set:
            assert re.cls[u] == 1
        else:
            assert re.cls[u] in (2, -1)


def test_scheduling_capacity():
    net, pol, sim, re, svc, grants = _one_realization()
    sbs_loads = np.bincount(svc.serving[svc.served_sbs],
                            minlength=len(re.sbs))
    assert sbs_loads.max(initial=0) <= net.U2
    mbs_loads = np.bincount(svc.serving[svc.served_mbs],
                            minlength=len(re.mbs))
    assert mbs_loads.max(initial=0) <= net.U1
    # every associated SBS serves min(assoc, U2) users
    assoc = np.bincount(svc.serving[re.cls == 1], minlength=len(re.sbs))
    assert np.array_equal(sbs_loads, np.minimum(assoc, net.U2))


def test_backhaul_capacity_and_consistency():
    net, pol, sim, re, svc, grants = _one_realization()
    bh = np.nonzero(re.cls == 2)[0]
    got = {}
    for u in bh:
        got.setdefault(int(svc.serving[u]), set())
        if svc.bh_ok[u]:
            got[int(svc.serving[u])].add(int(re.req[u]))
    assert all(len(files) <= CONTENT.cb for files in got.values())
    # same (mbs, file) pair always resolves the same way
    seen = {}
    for u in bh:
        key = (int(svc.serving[u]), int(re.req[u]))
        assert seen.setdefault(key, bool(svc.bh_ok[u])) == bool(svc.bh_ok[u])


def test_nulling_requests_match_brute_force():
    net, pol, sim, re, svc, grants = _one_realization()
    theta = np.zeros(len(re.sbs), dtype=int)
    for u in np.nonzero(svc.served_sbs)[0]:
        d = np.hypot(*(re.sbs - re.users[u]).T)
        close = np.nonzero(d <= pol.mu * svc.dist[u])[0]
        theta[close[close != svc.serving[u]]] += 1
    assert np.array_equal(theta, grants.theta)


def test_nulling_grant_capacity():
    net, pol, sim, re, svc, grants = _one_realization()
    delta = net.M2 - net.U2
    per_sbs = np.bincount(grants.pair_sbs[grants.granted],
                          minlength=len(re.sbs))
    assert per_sbs.max(initial=0) <= delta
    # grants saturate: an SBS leaves a request ungranted only when full
    req_per = np.bincount(grants.pair_sbs, minlength=len(re.sbs))
    assert np.array_equal(per_sbs, np.minimum(req_per, delta))


def test_mu_zero_disables_nulling():
    net, pol, sim, re, svc, grants = _one_realization(mu=0.0)
    assert grants.theta.sum() == 0
    assert len(grants.pair_user) == 0


# ---------------------------------------------------------------------------
# Estimator behaviour


def test_estimate_deterministic_rerun():
    net = make_net()
    sim = S.SimConfig(n_realizations=40, seed=5)
    a = S.estimate(net, CONTENT, POLICY, sim)
    b = S.estimate(net, CONTENT, POLICY, sim)
    assert a.q1_hat == b.q1_hat and a.q2_hat == b.q2_hat
    assert a.ase_hat == b.ase_hat
    assert a.theta_hist == b.theta_hist
    assert a.n_effective == b.n_effective


def test_estimate_jobs_split_matches_serial():
    net = make_net()
    sim = S.SimConfig(n_realizations=30, seed=9)
    a = S.estimate(net, CONTENT, POLICY, sim, jobs=1)
    b = S.estimate(net, CONTENT, POLICY, sim, jobs=3)
    assert a.q1_hat == b.q1_hat and a.q2_hat == b.q2_hat
    assert a.theta_hist == b.theta_hist


def test_sweep_monotone_in_threshold():
    net = make_net()
    sim = S.SimConfig(n_realizations=60, seed=4)
    grid = np.array([0.1, 0.5, 1.0, 2.0, 8.0])
    res = S.estimate_sweep(net, CONTENT, POLICY, sim, tau_grid=grid)
    assert np.all(np.diff(res.q1_hat) <= 1e-12)
    assert np.all(np.diff(res.q2_hat) <= 1e-12)


def test_ci_shrinks_with_realizations():
    net = make_net()
    a = S.estimate(net, CONTENT, POLICY, S.SimConfig(n_realizations=50,
                                                     seed=2))
    b = S.estimate(net, CONTENT, POLICY, S.SimConfig(n_realizations=200,
                                                     seed=2))
    ratio = b.q2_half_width / a.q2_half_width
    assert 0.3 < ratio < 0.8  # ~1/2 expected for 4x the sample


def test_margin_insensitivity():
    net = make_net()
    sim_a = S.SimConfig(n_realizations=150, seed=6, observation_margin=400.0)
    sim_b = S.SimConfig(n_realizations=150, seed=6, observation_margin=600.0)
    a = S.estimate(net, CONTENT, POLICY, sim_a)
    b = S.estimate(net, CONTENT, POLICY, sim_b)
    tol = 3 * (a.q2_half_width + b.q2_half_width)
    assert abs(a.q2_hat - b.q2_hat) < tol
    assert abs(a.q1_hat - b.q1_hat) < 3 * (a.q1_half_width + b.q1_half_width)


def test_sbs_request_fraction_matches_popularity_mass():
    net = make_net()
    sim = S.SimConfig(n_realizations=20, seed=8)
    hits = tot = 0
    for r in range(sim.n_realizations):
        rng = np.random.default_rng([sim.seed, r])
        re = S.realize_network(net, CONTENT, POLICY, sim, rng)
        hits += int(np.count_nonzero(re.cls == 1))
        tot += len(re.users)
    frac = hits / tot
    mass = sum(CONTENT.pop(n) for n in POLICY.nc_set)
    sigma = np.sqrt(mass * (1 - mass) / tot)
    assert abs(frac - mass) < 4 * sigma


def test_theta_hist_is_distribution():
    net = make_net()
    est = S.estimate(net, CONTENT, POLICY, S.SimConfig(n_realizations=50,
                                                       seed=1))
    assert sum(est.theta_hist.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(v > 0 for v in est.theta_hist.values())
    assert all(isinstance(k, int) and k >= 0 for k in est.theta_hist)


def test_sim_config_validation():
    with pytest.raises(InvalidParam):
        S.SimConfig(window_side=-1.0)
    with pytest.raises(InvalidParam):
        S.SimConfig(n_realizations=0)
    with pytest.raises(InvalidParam):
        S.SimConfig(window_side=100.0, observation_margin=60.0)


# ---------------------------------------------------------------------------
# Kernel backend agreement

_BACKEND_SNIPPET = """
import json
import numpy as np
from hetnet_in.model import NetworkParams, ContentConfig, CachingPolicy
from hetnet_in import simulator as S
net = NetworkParams(1e-4, 5e-4, 0.01, 8, 6, 8, 2, 4.0, 4.0, 1.0)
c = ContentConfig.from_zipf(12, 0.8, 4, 3, 2)
pol = CachingPolicy((5, 6, 7, 8), np.array([0.9, 0.8, 0.7, 0.6]), 1.4)
est = S.estimate(net, c, pol, S.SimConfig(n_realizations=40, seed=3))
print(json.dumps([repr(est.q1_hat), repr(est.q2_hat), repr(est.ase_hat),
                  sorted(est.theta_hist.items())]))
"""


def test_numba_and_numpy_backends_agree():
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, HETNET_IN_NO_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", _BACKEND_SNIPPET],
                           capture_output=True, text=True, env=env,
                           timeout=300)
        assert r.returncode == 0, r.stderr
        outs.append(json.loads(r.stdout))
    assert outs[0] == outs[1]
