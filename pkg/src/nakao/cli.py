"""Command-line entry point: one executable, file-based reproducible configs.

Subcommands: region, curves, sequences, testfn, simulate, sweep, report.
Every run resolves its configuration from built-in defaults, then an optional
JSON config file (unknown keys rejected), then explicit flags, and embeds the
resolved config in each output.  Exit codes: 0 success, 2 invalid
configuration or usage, 3 inconclusive sweep.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import exponents
from .exponents import (RegionScan, Verdict, critical_curve_q, critical_values,
                        diagonal_blowup_bound, fujita_exponent, p0_exponent,
                        region_scan, scan_arrays, strauss_exponent)
from .lifespan import InconclusiveSweep, sweep
from .output import write_csv, write_json
from .params import ProblemParams, admissible_cap
from .pde import InitialDataSpec, Numerics, run
from .slicing import (ConstantMode, InitMode, IterationConfig,
                      closed_form_exponents, even_beta_b, iterate,
                      iteration_bounds, lifespan_upper_bound, log_lower_bounds,
                      product_limit, thresholds)
from .svg import scatter_svg
from .testfn import PhiEvaluator


class ConfigError(ValueError):
    pass


# per-subcommand schema: key -> (type, default); None default means required
_COMMON = {"out": (str, None), "seed": (int, 0)}

_SCHEMAS: dict[str, dict] = {
    "region": {
        **_COMMON,
        "n": (int, None),
        "grid": (int, 200),
        "p_min": (float, math.nan), "p_max": (float, math.nan),
        "q_min": (float, math.nan), "q_max": (float, math.nan),
        "svg": (bool, False),
        "jobs": (int, 0),
    },
    "curves": {**_COMMON, "n_min": (int, 2), "n_max": (int, 12)},
    "sequences": {
        **_COMMON,
        "n": (int, None), "p": (float, None), "q": (float, None),
        "R": (float, 1.0), "epsilon": (float, 1.0),
        "jmax": (int, 41), "mode": (str, "eigenfunction"),
    },
    "testfn": {**_COMMON, "n": (int, None), "r_max": (float, 10.0),
               "num": (int, 201)},
    "simulate": {
        **_COMMON,
        "n": (int, None), "p": (float, None), "q": (float, None),
        "R": (float, 1.0), "epsilon": (float, 1.0),
        "h": (float, 0.02), "cfl": (float, 0.45), "t_max": (float, 40.0),
        "threshold": (float, 1e8), "shape": (str, "bump"),
        "amp_u0": (float, 1.0), "amp_u1": (float, 1.0),
        "amp_v0": (float, 1.0), "amp_v1": (float, 1.0),
    },
    "sweep": {
        **_COMMON,
        "n": (int, None), "p": (float, None), "q": (float, None),
        "R": (float, 1.0),
        "epsilons": (list, [0.4, 0.3, 0.2, 0.15, 0.1]),
        "h": (float, 0.02), "cfl": (float, 0.45), "t_max": (float, 60.0),
        "threshold": (float, 1e8), "shape": (str, "bump"),
        "amp_u0": (float, 1.0), "amp_u1": (float, 1.0),
        "amp_v0": (float, 1.0), "amp_v1": (float, 1.0),
        "tol": (float, 0.35),
        "jobs": (int, 0),
    },
    "report": {
        **_COMMON,
        "n": (int, None), "p": (float, None), "q": (float, None),
        "R": (float, 1.0), "epsilon": (float, 1.0),
    },
}

_DEFAULT_OUT = {
    "region": "region", "curves": "curves", "sequences": "sequences",
    "testfn": "testfn_phi", "simulate": "simulate", "sweep": "sweep",
    "report": "report",
}


def _coerce(key: str, kind, value):
    try:
        if kind is bool:
            if isinstance(value, bool):
                return value
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes")
            return bool(value)
        if kind is list:
            if isinstance(value, str):
                return [float(v) for v in value.split(",") if v]
            return [float(v) for v in value]
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def resolve_config(command: str, file_path: str | None,
                   flags: dict) -> dict:
    """defaults <- config file <- explicit flags, with strict key checking."""
    schema = _SCHEMAS[command]
    cfg = {k: d for k, (_, d) in schema.items()}
    cfg["out"] = _DEFAULT_OUT[command]
    if file_path:
        try:
            raw = json.loads(open(file_path, encoding="utf-8").read())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {file_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(raw) - set(schema))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for k, v in raw.items():
            cfg[k] = _coerce(k, schema[k][0], v)
    for k, v in flags.items():
        if v is not None and k in schema:
            cfg[k] = _coerce(k, schema[k][0], v)
    missing = [k for k, v in cfg.items()
               if v is None or (isinstance(v, float) and math.isnan(v) and
                                k not in ("p_min", "p_max", "q_min", "q_max"))]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(sorted(missing))}")
    return cfg


def _jobs(cfg: dict) -> int:
    if cfg.get("jobs"):
        return max(1, int(cfg["jobs"]))
    env = os.environ.get("NAKAO_JOBS")
    return max(1, int(env)) if env else 1


# ---------------------------------------------------------------------------
# subcommands

_REGION_COLORS = {0: "#c62828", 1: "#ef9a00", 2: "#9e9e9e", 3: "#e0e0e0"}
_REGION_LABELS = [("blow_up", "#c62828"), ("wakasugi_only", "#ef9a00"),
                  ("none_known", "#9e9e9e"), ("inadmissible", "#e0e0e0")]


def _region_chunk(args):
    n, p_block, q_block = args
    return scan_arrays(n, p_block, q_block)


def cmd_region(cfg: dict) -> int:
    n, res = cfg["n"], cfg["grid"]
    cap = admissible_cap(n)
    p_max = cfg["p_max"] if not math.isnan(cfg["p_max"]) else \
        (cap if math.isfinite(cap) else 6.0)
    q_max = cfg["q_max"] if not math.isnan(cfg["q_max"]) else \
        (cap if math.isfinite(cap) else 6.0)
    p_min = cfg["p_min"] if not math.isnan(cfg["p_min"]) else \
        1.0 + (p_max - 1.0) / res
    q_min = cfg["q_min"] if not math.isnan(cfg["q_min"]) else \
        1.0 + (q_max - 1.0) / res
    cfg = {**cfg, "p_min": p_min, "p_max": p_max,
           "q_min": q_min, "q_max": q_max}
    ps = np.linspace(p_min, p_max, res)
    qs = np.linspace(q_min, q_max, res)
    P, Q = np.meshgrid(ps, qs, indexing="ij")
    P, Q = P.ravel(), Q.ravel()
    jobs = _jobs(cfg)
    if jobs > 1:
        blocks = np.array_split(np.arange(P.size), jobs)
        tasks = [(n, P[b], Q[b]) for b in blocks if b.size]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_region_chunk, tasks))
        aN = np.concatenate([p[0] for p in parts])
        F = np.concatenate([p[1] for p in parts])
        codes = np.concatenate([p[2] for p in parts])
        binding = np.concatenate([p[3] for p in parts])
    else:
        aN, F, codes, binding = scan_arrays(n, P, Q)
    scan = RegionScan(n=n, p=P, q=Q, alpha_n=aN, F=F, verdict_code=codes,
                      binding=binding)
    out = cfg["out"]
    write_csv(f"{out}.csv", cfg,
              ["p", "q", "alphaN", "F", "verdict", "binding_component"],
              scan.rows())
    if cfg["svg"]:
        colors = [_REGION_COLORS[int(c)] for c in codes]
        curve_p, curve_q = [], []
        for pv in ps:
            qc = critical_curve_q(n, float(pv), q_max)
            if qc is not None and qc >= q_min:
                curve_p.append(float(pv))
                curve_q.append(qc)
        curves = [(curve_p, curve_q, "#1a237e")] if len(curve_p) > 1 else None
        scatter_svg(f"{out}.svg", P, Q, colors, "p", "q",
                    f"blow-up classification, n={n}", legend=_REGION_LABELS,
                    point_size=max(2.0, 360.0 / res), config=cfg,
                    curves=curves)
    return 0


def cmd_curves(cfg: dict) -> int:
    rows = []
    for n in range(cfg["n_min"], cfg["n_max"] + 1):
        rows.append((n, strauss_exponent(n), fujita_exponent(n),
                     p0_exponent(n) if n >= 2 else None,
                     diagonal_blowup_bound(n), admissible_cap(n)))
    write_csv(f"{cfg['out']}.csv", cfg,
              ["n", "strauss", "fujita", "p0", "diagonal_bound", "cap"],
              rows)
    return 0


def cmd_sequences(cfg: dict) -> int:
    params = ProblemParams(n=cfg["n"], p=cfg["p"], q=cfg["q"], R=cfg["R"],
                           epsilon=cfg["epsilon"])
    config = IterationConfig(params=params, init_mode=InitMode(cfg["mode"]))
    states = iterate(config, cfg["jmax"])
    bounds = iteration_bounds(config)
    rows = []
    for st in states:
        if st.j % 2 == 1:
            lo_u, lo_v = log_lower_bounds(st.j, config, bounds)
            cf = closed_form_exponents(st.j, config)
            rec = (st.alpha, st.a, st.beta, st.b)
            ok = all(abs(a - b) <= 1e-10 * max(1.0, abs(b))
                     for a, b in zip(cf, rec))
        else:
            lo_u = lo_v = None
            cf = even_beta_b(st.j, config)
            ok = all(abs(a - b) <= 1e-10 * max(1.0, abs(b))
                     for a, b in zip(cf, (st.beta, st.b)))
        rows.append((st.j, st.ell, st.L, st.alpha, st.a, st.beta, st.b,
                     st.log_d, st.log_q, lo_u, lo_v, "ok" if ok else "FAIL"))
    write_csv(f"{cfg['out']}.csv", cfg,
              ["j", "ell_j", "L_j", "alpha_j", "a_j", "beta_j", "b_j",
               "logD_j", "logQ_j", "logD_lower", "logQ_lower",
               "closed_form_ok"],
              rows)
    return 0


def cmd_testfn(cfg: dict) -> int:
    ev = PhiEvaluator(cfg["n"])
    r = np.linspace(0.0, cfg["r_max"], cfg["num"])
    log_phi = ev.log_phi(r)
    write_csv(f"{cfg['out']}.csv", cfg, ["r", "phi", "log_phi"],
              zip(r, np.exp(log_phi), log_phi))
    return 0


def _sim_pieces(cfg: dict):
    params = ProblemParams(n=cfg["n"], p=cfg["p"], q=cfg["q"], R=cfg["R"],
                           epsilon=cfg.get("epsilon", 1.0))
    spec = InitialDataSpec(shape=cfg["shape"], amp_u0=cfg["amp_u0"],
                           amp_u1=cfg["amp_u1"], amp_v0=cfg["amp_v0"],
                           amp_v1=cfg["amp_v1"])
    numerics = Numerics(h=cfg["h"], cfl=cfg["cfl"], t_max=cfg["t_max"],
                        threshold=cfg["threshold"])
    return params, spec, numerics


def cmd_simulate(cfg: dict) -> int:
    params, spec, numerics = _sim_pieces(cfg)
    trace = run(params, spec, numerics)
    out = cfg["out"]
    write_csv(f"{out}.csv", cfg,
              ["t", "U", "V", "V1", "maxu", "maxv", "res_u", "res_v"],
              zip(trace.times, trace.U, trace.V, trace.V1, trace.max_u,
                  trace.max_v, trace.res_u, trace.res_v))
    write_json(f"{out}.meta.json", {
        "config": cfg,
        "dt": numerics.cfl * numerics.h,
        "r_max": numerics.resolved_r_max(params.R),
        "t_blowup": trace.t_blowup,
        "blowup_reason": trace.reason.value,
        "support_max_excess": trace.support_max_excess,
        "res_u_max": trace.res_u_max,
        "res_v_max": trace.res_v_max,
        "du0": trace.du0,
        "dv0": trace.dv0,
    })
    return 0


def cmd_sweep(cfg: dict) -> int:
    params, spec, numerics = _sim_pieces({**cfg, "epsilon": 1.0})
    out = cfg["out"]
    try:
        fit = sweep(params, cfg["epsilons"], spec, numerics, tol=cfg["tol"],
                    jobs=_jobs(cfg))
    except InconclusiveSweep as exc:
        write_json(f"{out}.json", {"config": cfg, "error": str(exc)})
        print(f"sweep inconclusive: {exc}", file=sys.stderr)
        return 3
    write_csv(f"{out}.csv", cfg, ["epsilon", "T_blowup", "h", "threshold"],
              [(e, t, numerics.h, numerics.threshold)
               for e, t in zip(fit.epsilons, fit.t_values)])
    write_json(f"{out}.json", {
        "config": cfg,
        "fitted": fit.fitted_slope,
        "stderr": fit.slope_stderr,
        "predicted": fit.predicted_slope,
        "consistent": fit.consistent,
        "tol": fit.tol,
        "epsilons": list(fit.epsilons),
        "t_values": list(fit.t_values),
        "inconclusive": sorted(fit.inconclusive),
    })
    return 3 if fit.inconclusive else 0


def cmd_report(cfg: dict) -> int:
    params = ProblemParams(n=cfg["n"], p=cfg["p"], q=cfg["q"], R=cfg["R"],
                           epsilon=cfg["epsilon"])
    rep = critical_values(params)
    doc = {
        "config": cfg,
        "alpha_w": rep.alpha_w, "alpha_dw": rep.alpha_dw,
        "alpha_nw": rep.alpha_nw, "alpha0": rep.alpha0,
        "alpha1": rep.alpha1, "alphaN": rep.alpha_n,
        "F1": rep.F1, "F2": rep.F2, "F3": rep.F3, "F4": rep.F4, "F": rep.F,
        "verdict": rep.verdict.value,
        "strauss": strauss_exponent(params.n),
        "fujita": fujita_exponent(params.n),
        "p0": p0_exponent(params.n) if params.n >= 2 else None,
        "diagonal_bound": diagonal_blowup_bound(params.n),
        "product_limit": product_limit(params.pq),
    }
    for mode in InitMode:
        config = IterationConfig(params=params, init_mode=mode)
        j0, j1 = thresholds(config)
        doc[f"j0_{mode.value}"] = j0
        doc[f"j1_{mode.value}"] = j1
    if rep.verdict is Verdict.BLOW_UP:
        lb = lifespan_upper_bound(params)
        doc["lifespan_upper_bound"] = lb.t_upper
        doc["binding_exponent"] = lb.binding
        doc["bound_floor"] = lb.floor
        doc["bound_candidates"] = lb.candidates
    write_json(f"{cfg['out']}.json", doc)
    return 0


_COMMANDS = {
    "region": cmd_region, "curves": cmd_curves, "sequences": cmd_sequences,
    "testfn": cmd_testfn, "simulate": cmd_simulate, "sweep": cmd_sweep,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nakao",
        description="Critical curves, iteration bounds and blow-up "
                    "experiments for the coupled damped-wave/wave system.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in _SCHEMAS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file (strict keys)")
        for key, (kind, _) in schema.items():
            flag = "--" + key.replace("_", "-")
            if kind is bool:
                sp.add_argument(flag, dest=key, action="store_const",
                                const=True, default=None)
            elif kind is list:
                sp.add_argument(flag, dest=key, default=None,
                                help="comma-separated values")
            else:
                sp.add_argument(flag, dest=key, type=str, default=None)
    return parser


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    flags = {k: v for k, v in vars(ns).items()
             if k not in ("command", "config")}
    try:
        cfg = resolve_config(ns.command, ns.config, flags)
        return _COMMANDS[ns.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
