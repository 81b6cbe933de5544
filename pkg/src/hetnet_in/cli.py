"""Batch experiment runner.

Parses a YAML experiment config, dispatches analyze / simulate / optimize /
sweep jobs, and writes CSV results with a sidecar metadata file.  Outputs are
deterministic: fixed column order, 12-significant-digit formatting, and a
config hash on every row, so re-running an identical spec reproduces the
files byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np
import yaml

from . import analytics, optimizer, simulator
from .errors import ConfigError, HetnetError
from .model import CachingPolicy, ContentConfig, NetworkParams

SCHEMA_VERSION = "1"

_MODES = ("analyze", "simulate", "optimize", "sweep")
_AXES = ("tau", "tau_db", "zipf_gamma", "cb", "u2", "mu")


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def _require(section: dict, path: str, allowed: set):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")


def _get(section: dict, key: str, path: str, required=True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}: missing required key")
        return default
    return section[key]


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _build_net(sec: dict, path: str = "net") -> NetworkParams:
    if not isinstance(sec, dict):
        raise ConfigError(f"{path}: must be a mapping")
    _require(sec, path, {"lambda1", "lambda2", "lambda_u", "m1", "m2", "u1",
                         "u2", "alpha1", "alpha2", "tau", "tau_db",
                         "p1_dbm", "p2_dbm"})
    if ("tau" in sec) == ("tau_db" in sec):
        raise ConfigError(f"{path}: exactly one of tau / tau_db is required")
    tau = float(sec["tau"]) if "tau" in sec else _db_to_linear(
        float(sec["tau_db"]))
    try:
        return NetworkParams(
            lambda1=float(_get(sec, "lambda1", path)),
            lambda2=float(_get(sec, "lambda2", path)),
            lambda_u=float(_get(sec, "lambda_u", path)),
            M1=int(_get(sec, "m1", path)), M2=int(_get(sec, "m2", path)),
            U1=int(_get(sec, "u1", path)), U2=int(_get(sec, "u2", path)),
            alpha1=float(_get(sec, "alpha1", path)),
            alpha2=float(_get(sec, "alpha2", path)),
            tau=tau,
            P1_dbm=float(sec.get("p1_dbm", 46.0)),
            P2_dbm=float(sec.get("p2_dbm", 23.0)),
        )
    except HetnetError as e:
        raise ConfigError(f"{path}: {e}") from e


def _build_content(sec: dict, path: str = "content") -> ContentConfig:
    if not isinstance(sec, dict):
        raise ConfigError(f"{path}: must be a mapping")
    _require(sec, path, {"n_files", "zipf_gamma", "popularity", "n1", "c2",
                         "cb"})
    if ("zipf_gamma" in sec) == ("popularity" in sec):
        raise ConfigError(
            f"{path}: exactly one of zipf_gamma / popularity is required")
    try:
        if "zipf_gamma" in sec:
            return ContentConfig.from_zipf(
                n_files=int(_get(sec, "n_files", path)),
                zipf_gamma=float(sec["zipf_gamma"]),
                n1=int(_get(sec, "n1", path)),
                c2=int(_get(sec, "c2", path)),
                cb=int(_get(sec, "cb", path)))
        return ContentConfig(
            n_files=int(_get(sec, "n_files", path)),
            popularity=np.asarray(sec["popularity"], dtype=float),
            n1=int(_get(sec, "n1", path)),
            c2=int(_get(sec, "c2", path)),
            cb=int(_get(sec, "cb", path)))
    except HetnetError as e:
        raise ConfigError(f"{path}: {e}") from e


def _build_policy(sec: dict, path: str = "policy") -> CachingPolicy:
    if not isinstance(sec, dict):
        raise ConfigError(f"{path}: must be a mapping")
    _require(sec, path, {"nc_set", "t", "mu"})
    try:
        return CachingPolicy(
            nc_set=tuple(int(n) for n in _get(sec, "nc_set", path)),
            T=np.asarray(_get(sec, "t", path), dtype=float),
            mu=float(_get(sec, "mu", path)))
    except HetnetError as e:
        raise ConfigError(f"{path}: {e}") from e


def _build_sim(sec: dict, path: str = "sim") -> simulator.SimConfig:
    if sec is None:
        return simulator.SimConfig()
    if not isinstance(sec, dict):
        raise ConfigError(f"{path}: must be a mapping")
    _require(sec, path, {"window_side", "n_realizations", "seed",
                         "observation_margin", "sir_sample_cap"})
    try:
        return simulator.SimConfig(
            window_side=float(sec.get("window_side", 2000.0)),
            n_realizations=int(sec.get("n_realizations", 50_000)),
            seed=int(sec.get("seed", 0)),
            observation_margin=(None if sec.get("observation_margin") is None
                                else float(sec["observation_margin"])),
            sir_sample_cap=int(sec.get("sir_sample_cap", 256)))
    except HetnetError as e:
        raise ConfigError(f"{path}: {e}") from e


def _build_opt(sec: dict, path: str = "opt") -> optimizer.OptimizerConfig:
    if sec is None:
        return optimizer.OptimizerConfig()
    if not isinstance(sec, dict):
        raise ConfigError(f"{path}: must be a mapping")
    fields = {"bisect_tol", "mu_grid", "golden_tol", "alt_max_iters",
              "alt_tol", "ccp_max_iters", "ccp_tol", "ccp_restarts"}
    _require(sec, path, fields)
    kwargs = {}
    for k in fields:
        if k in sec:
            kwargs[k] = (int(sec[k]) if k in ("mu_grid", "alt_max_iters",
                                              "ccp_max_iters", "ccp_restarts")
                         else float(sec[k]))
    try:
        return optimizer.OptimizerConfig(**kwargs)
    except HetnetError as e:
        raise ConfigError(f"{path}: {e}") from e


class ExperimentSpec:
    def __init__(self, mode, net, content, policy, sim, opt, axis, values,
                 output_path, resolved):
        self.mode = mode
        self.net = net
        self.content = content
        self.policy = policy
        self.sim = sim
        self.opt = opt
        self.axis = axis
        self.values = values
        self.output_path = output_path
        self.resolved = resolved
        self.config_hash = hashlib.sha256(
            json.dumps(resolved, sort_keys=True).encode()).hexdigest()[:16]


def load_spec(path: str, mode: str, seed=None, out=None) -> ExperimentSpec:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config is not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _require(raw, "<root>", {"mode", "net", "content", "policy", "sim", "opt",
                             "sweep_axis", "output_path"})
    cfg_mode = raw.get("mode", mode)
    if cfg_mode not in _MODES:
        raise ConfigError(f"mode: must be one of {_MODES}, got {cfg_mode!r}")
    if cfg_mode != mode:
        raise ConfigError(
            f"mode: config says {cfg_mode!r} but the {mode!r} command was run")

    net = _build_net(_get(raw, "net", "<root>"))
    content = _build_content(_get(raw, "content", "<root>"))
    policy = None
    if mode in ("analyze", "simulate"):
        policy = _build_policy(_get(raw, "policy", "<root>"))
        try:
            policy.validate(content)
        except HetnetError as e:
            raise ConfigError(f"policy: {e}") from e
    elif raw.get("policy") is not None:
        policy = _build_policy(raw["policy"])
    sim = _build_sim(raw.get("sim"))
    if seed is not None:
        sim = simulator.SimConfig(sim.window_side, sim.n_realizations,
                                  int(seed), sim.observation_margin,
                                  sim.sir_sample_cap)
    opt = _build_opt(raw.get("opt"))

    axis = values = None
    if raw.get("sweep_axis") is not None:
        sec = raw["sweep_axis"]
        if not isinstance(sec, dict):
            raise ConfigError("sweep_axis: must be a mapping")
        _require(sec, "sweep_axis", {"param", "values"})
        axis = _get(sec, "param", "sweep_axis")
        if axis not in _AXES:
            raise ConfigError(
                f"sweep_axis.param: must be one of {_AXES}, got {axis!r}")
        values = [float(v) for v in _get(sec, "values", "sweep_axis")]
        if len(values) == 0:
            raise ConfigError("sweep_axis.values: must be nonempty")
        diffs = np.diff(values)
        if not ((diffs > 0).all() or (diffs < 0).all()):
            raise ConfigError("sweep_axis.values: must be strictly monotone")
        if axis == "mu" and mode not in ("analyze", "simulate"):
            raise ConfigError("sweep_axis.param: mu sweeps require a policy")
        if axis == "zipf_gamma" and "zipf_gamma" not in raw["content"]:
            raise ConfigError(
                "sweep_axis.param: zipf_gamma sweep needs zipf content")
    if mode == "sweep" and axis is None:
        raise ConfigError("sweep_axis: required for sweep mode")

    output_path = out if out is not None else raw.get("output_path", ".")
    resolved = {
        "schema_version": SCHEMA_VERSION, "mode": mode,
        "net": {k: getattr(net, k) for k in (
            "lambda1", "lambda2", "lambda_u", "M1", "M2", "U1", "U2",
            "alpha1", "alpha2", "tau", "P1_dbm", "P2_dbm")},
        "content": {"n_files": content.n_files, "n1": content.n1,
                    "c2": content.c2, "cb": content.cb,
                    "popularity": [float(a) for a in content.popularity]},
        "policy": (None if policy is None else {
            "nc_set": list(policy.nc_set), "t": [float(x) for x in policy.T],
            "mu": policy.mu}),
        "sim": {"window_side": sim.window_side,
                "n_realizations": sim.n_realizations, "seed": sim.seed,
                "observation_margin": sim.observation_margin,
                "sir_sample_cap": sim.sir_sample_cap},
        "opt": {k: getattr(opt, k) for k in (
            "bisect_tol", "mu_grid", "golden_tol", "alt_max_iters", "alt_tol",
            "ccp_max_iters", "ccp_tol", "ccp_restarts")},
        "sweep_axis": (None if axis is None
                       else {"param": axis, "values": values}),
    }
    return ExperimentSpec(mode, net, content, policy, sim, opt, axis, values,
                          output_path, resolved)


# ---------------------------------------------------------------------------
# Axis application


def _apply_axis(spec: ExperimentSpec, value: float):
    """(net, content, policy) with the axis parameter set to ``value``."""
    net, content, policy = spec.net, spec.content, spec.policy
    if spec.axis is None:
        return net, content, policy
    kw = {k: getattr(net, k) for k in (
        "lambda1", "lambda2", "lambda_u", "M1", "M2", "U1", "U2",
        "alpha1", "alpha2", "tau", "P1_dbm", "P2_dbm")}
    if spec.axis == "tau":
        kw["tau"] = value
    elif spec.axis == "tau_db":
        kw["tau"] = _db_to_linear(value)
    elif spec.axis == "u2":
        kw["U2"] = int(round(value))
    elif spec.axis == "zipf_gamma":
        content = ContentConfig.from_zipf(
            n_files=content.n_files, zipf_gamma=value, n1=content.n1,
            c2=content.c2, cb=content.cb)
    elif spec.axis == "cb":
        content = ContentConfig(content.n_files, content.popularity,
                                content.n1, content.c2, int(round(value)))
    elif spec.axis == "mu":
        policy = CachingPolicy(policy.nc_set, policy.T, value)
    net = NetworkParams(**kw)
    return net, content, policy


# ---------------------------------------------------------------------------
# Output helpers


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_meta(base, spec: ExperimentSpec, extra=None):
    meta = {"schema_version": SCHEMA_VERSION, "mode": spec.mode,
            "config_hash": spec.config_hash, "seed": spec.sim.seed,
            "resolved_config": spec.resolved}
    if extra:
        meta.update(extra)
    with open(base + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _axis_cols(spec, value):
    if spec.axis is None:
        return ["none", ""]
    return [spec.axis, _fmt(float(value))]


# ---------------------------------------------------------------------------
# Mode runners


def _analyze_row(args):
    spec, value = args
    net, content, policy = _apply_axis(spec, value)
    rep = analytics.report(net, content, policy)
    return _axis_cols(spec, value) + [
        spec.config_hash, rep.q1, rep.q2, rep.ase, rep.ase_lower,
        rep.ase_upper, rep.theta_bar, rep.epsilon, rep.psi1]


_ANALYZE_HEADER = ["axis", "axis_value", "config_hash", "q1", "q2", "ase",
                   "ase_lower", "ase_upper", "theta_bar", "epsilon", "psi1"]


def run_analyze(spec: ExperimentSpec, jobs: int = 1):
    values = spec.values if spec.axis is not None else [None]
    tasks = [(spec, v) for v in values]
    rows = _map(jobs, _analyze_row, tasks)
    os.makedirs(spec.output_path, exist_ok=True)
    base = os.path.join(spec.output_path, "analyze")
    _write_csv(base + ".csv", _ANALYZE_HEADER, rows)
    _write_meta(base, spec)
    return 0


_SIM_HEADER = ["axis", "axis_value", "config_hash",
               "q1_sim", "q1_half_width", "q2_sim", "q2_half_width",
               "ase_sim", "ase_half_width", "q1_analytic", "q2_analytic",
               "ase_analytic", "n_effective", "n_dropped"]


def _simulate_point(args):
    spec, value = args
    net, content, policy = _apply_axis(spec, value)
    est = simulator.estimate(net, content, policy, spec.sim)
    rep = analytics.report(net, content, policy)
    row = _axis_cols(spec, value) + [
        spec.config_hash, est.q1_hat, est.q1_half_width, est.q2_hat,
        est.q2_half_width, est.ase_hat, est.ase_half_width,
        rep.q1, rep.q2, rep.ase, est.n_effective, est.n_dropped]
    return row, est.theta_hist


def run_simulate(spec: ExperimentSpec, jobs: int = 1):
    os.makedirs(spec.output_path, exist_ok=True)
    base = os.path.join(spec.output_path, "simulate")

    if spec.axis in ("tau", "tau_db", None):
        # one shared set of realizations thresholded over the whole grid
        values = spec.values if spec.axis is not None else [None]
        if spec.axis is None:
            grid = np.array([spec.net.tau])
        else:
            taus = np.asarray(spec.values, dtype=float)
            grid = _db_to_linear(taus) if spec.axis == "tau_db" else taus
        res = simulator.estimate_sweep(spec.net, spec.content, spec.policy,
                                       spec.sim, tau_grid=grid, jobs=jobs)
        rows = []
        for i, v in enumerate(values):
            net, content, policy = _apply_axis(spec, v)
            rep = analytics.report(net, content, policy)
            est = res.at(i)
            rows.append(_axis_cols(spec, v) + [
                spec.config_hash, est.q1_hat, est.q1_half_width, est.q2_hat,
                est.q2_half_width, est.ase_hat, est.ase_half_width,
                rep.q1, rep.q2, rep.ase, est.n_effective, est.n_dropped])
        hist = res.theta_hist
        theta_bar = analytics.mean_theta(spec.policy.n_cached,
                                         spec.content.c2, spec.net.U2,
                                         spec.policy.mu)
    else:
        outs = _map(jobs, _simulate_point, [(spec, v) for v in spec.values])
        rows = [r for r, _ in outs]
        hist = outs[0][1]
        net0, content0, pol0 = _apply_axis(spec, spec.values[0])
        theta_bar = analytics.mean_theta(pol0.n_cached, content0.c2,
                                         net0.U2, pol0.mu)

    _write_csv(base + ".csv", _SIM_HEADER, rows)
    hrows = [[k, hist[k], analytics.theta_pmf(k, theta_bar)]
             for k in sorted(hist)]
    _write_csv(os.path.join(spec.output_path, "theta_hist.csv"),
               ["theta", "frequency", "analytic_pmf"], hrows)
    _write_meta(base, spec)
    return 0


_OPT_HEADER = ["axis", "axis_value", "config_hash", "method", "n_cached",
               "nc_set", "t", "mu", "objective", "ase_exact"]


def _opt_rows(args):
    spec, value = args
    net, content, _ = _apply_axis(spec, value)
    sols = {
        "proposed": optimizer.alternate(net, content, spec.opt),
        "mpc": optimizer.baseline_mpc(net, content, spec.opt),
        "udc": optimizer.baseline_udc(net, content, spec.opt),
        "upper": optimizer.ccp_upper(net, content, spec.opt,
                                     seed=spec.sim.seed),
    }
    rows = []
    for method in ("proposed", "mpc", "udc", "upper"):
        s = sols[method]
        exact = analytics.ase(net, content, s.policy(), "exact")
        rows.append(_axis_cols(spec, value) + [
            spec.config_hash, method, len(s.nc_set),
            ";".join(str(n) for n in s.nc_set),
            ";".join(_fmt(float(x)) for x in s.T),
            s.mu, s.objective, exact])
    return rows


def run_optimize(spec: ExperimentSpec, jobs: int = 1):
    values = spec.values if spec.axis is not None else [None]
    nested = _map(jobs, _opt_rows, [(spec, v) for v in values])
    rows = [r for point in nested for r in point]
    os.makedirs(spec.output_path, exist_ok=True)
    name = "sweep" if spec.mode == "sweep" else "optimize"
    base = os.path.join(spec.output_path, name)
    _write_csv(base + ".csv", _OPT_HEADER, rows)
    _write_meta(base, spec)
    return 0


def _map(jobs, fn, tasks):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


# ---------------------------------------------------------------------------
# Entry point


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hetnet-in",
        description="Cache-enabled multi-antenna HetNet analyzer/optimizer")
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in _MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", required=True)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.config, args.command, seed=args.seed,
                         out=args.out)
        if args.command == "analyze":
            return run_analyze(spec, args.jobs)
        if args.command == "simulate":
            return run_simulate(spec, args.jobs)
        return run_optimize(spec, args.jobs)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (HetnetError, ArithmeticError) as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
