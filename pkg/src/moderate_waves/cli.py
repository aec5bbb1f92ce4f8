"""Batch command line front end.

    moderate-waves {simulate,residual,rates,nonuniform,check}
        [--config PATH] [--output DIR] [--seed INT] [--threads INT]

Configs are JSON objects; unknown keys are rejected. Every number in a JSON
report is tagged with one of the labels in ``PROVENANCE``. Exit codes:
0 ok, 1 property failure, 2 config error, 3 breakdown.
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import checks
from .approx import ApproxParams, approx_solution, rate_bound
from .experiments import (
    config_fingerprint,
    default_sigma,
    gap_lower_bound,
    residual_rate_study,
    run_error_decay_study,
    run_nonuniform_study,
)
from .integrator import SolverConfig, simulate
from .spectral import constant, from_modes, make_grid, zeros

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_BREAKDOWN = 0, 1, 2, 3
PROVENANCE = ("measured", "closed-form", "paper-bound")


class ConfigError(ValueError):
    pass


# -- serialization ----------------------------------------------------------------


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating,)):
        return _clean(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def tag(value, provenance: str) -> dict:
    if provenance not in PROVENANCE:
        raise ValueError(provenance)
    return {"value": value, "provenance": provenance}


def write_json(path: Path, payload: dict):
    text = json.dumps(_clean(payload), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, header: list[str], rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


PLOT_TEMPLATE = '''"""Plot {csv} (generated; requires matplotlib)."""
import csv

import matplotlib.pyplot as plt

with open("{csv}") as fh:
    rows = list(csv.DictReader(fh))
x = [float(r["{x}"]) for r in rows]
fig, ax = plt.subplots()
for col in {ys!r}:
    ax.{plot}(x, [abs(float(r[col])) for r in rows], "o-", label=col)
ax.set_xlabel("{x}")
ax.legend()
fig.savefig("{png}", dpi=150)
'''


def write_plot_script(out: Path, csv_name: str, x: str, ys: list[str], loglog: bool = False):
    script = PLOT_TEMPLATE.format(
        csv=csv_name, x=x, ys=ys, plot="loglog" if loglog else "plot",
        png=csv_name.replace(".csv", ".png"),
    )
    (out / f"plot_{csv_name.replace('.csv', '.py')}").write_text(script)


# -- config parsing ----------------------------------------------------------------


def _strict(cfg: dict, allowed: dict, where: str) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}")
    return {**allowed, **cfg}


SOLVER_KEYS = {f.name: f.default for f in fields(SolverConfig)}


def parse_solver(cfg: dict | None, **overrides) -> SolverConfig:
    merged = _strict(cfg or {}, SOLVER_KEYS, "solver")
    merged.update({k: v for k, v in overrides.items() if k not in (cfg or {})})
    try:
        return SolverConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from exc


def _number_list(v, where: str, kind=float) -> list:
    if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ConfigError(f"{where}: expected a list of numbers")
    if kind is int and not all(float(x).is_integer() for x in v):
        raise ConfigError(f"{where}: expected integers")
    return [kind(x) for x in v]


def build_initial(cfg: dict, n_modes: int):
    kind = cfg.get("kind") if isinstance(cfg, dict) else None
    grid = make_grid(n_modes)
    if kind == "zero":
        _strict(cfg, {"kind": None}, "initial")
        return zeros(grid)
    if kind == "constant":
        c = _strict(cfg, {"kind": None, "value": 0.0}, "initial")
        return constant(float(c["value"]), grid)
    if kind == "approx":
        c = _strict(cfg, {"kind": None, "omega": 1, "n": 16, "s": 2.0}, "initial")
        p = ApproxParams(int(c["omega"]), int(c["n"]), float(c["s"]))
        return approx_solution(p, 0.0, grid)
    if kind == "modes":
        c = _strict(cfg, {"kind": None, "modes": []}, "initial")
        modes = {int(k): complex(re, im) for k, re, im in c["modes"]}
        u = from_modes(modes, grid)
        if u.bandwidth() > n_modes // 6:
            raise ConfigError("initial: modes must be band limited to N/6")
        return u
    raise ConfigError("initial.kind must be one of zero, constant, approx, modes")


# -- commands ------------------------------------------------------------------------


def _config_errors(func):
    """Report any validation failure inside ``func`` as a ConfigError."""

    @functools.wraps(func)
    def wrapper(cfg):
        try:
            return func(cfg)
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"{func.__name__.removeprefix('_prepare_')}: {exc}") from exc

    return wrapper


@_config_errors
def _prepare_simulate(cfg: dict):
    c = _strict(cfg, {"initial": {"kind": "zero"}, "solver": {}}, "simulate")
    solver = parse_solver(c["solver"])
    u0 = build_initial(c["initial"], solver.n_modes)
    return solver, u0, c


def cmd_simulate(cfg: dict, out: Path, seed: int = 0, threads: int = 1) -> int:
    solver, u0, c = _prepare_simulate(cfg)
    out.mkdir(parents=True, exist_ok=True)
    traj = simulate(u0, solver)
    write_csv(
        out / "trajectory.csv",
        ["t", "h1", "hs", "min_slope"],
        zip(traj.times, traj.h1_series, traj.hs_series, traj.min_slope_series),
    )
    write_plot_script(out, "trajectory.csv", "t", ["h1", "hs", "min_slope"])
    summary = {
        "command": "simulate",
        "config": c,
        "seed": seed,
        "status": traj.status,
        "status_time": traj.status_time,
        "reason": traj.reason,
        "steps": traj.steps,
        "s": solver.s,
        "t_final": tag(traj.times[-1], "measured"),
        "h1_initial": tag(traj.h1_series[0], "measured"),
        "h1_final": tag(traj.h1_series[-1], "measured"),
        "h1_drift": tag(float(np.max(traj.h1_drift)), "measured"),
        "hs_initial": tag(traj.hs_series[0], "measured"),
        "hs_final": tag(traj.hs_series[-1], "measured"),
        "hs_max": tag(max(traj.hs_series), "measured"),
        "min_slope": tag(min(traj.min_slope_series), "measured"),
        "columns": {"t": "measured", "h1": "measured", "hs": "measured", "min_slope": "measured"},
        "solver_fingerprint": config_fingerprint(solver, initial=c["initial"]),
    }
    write_json(out / "summary.json", summary)
    return EXIT_OK if traj.status == "completed" else EXIT_BREAKDOWN


RESIDUAL_KEYS = {"s": 2.0, "sigma": 1.0, "n_list": [8, 16, 32, 64, 128], "t": 0.3, "omega": 1, "n_modes": None, "slope_tol": 0.2}


@_config_errors
def _prepare_residual(cfg: dict):
    c = _strict(cfg, RESIDUAL_KEYS, "residual")
    n_list = _number_list(c["n_list"], "residual.n_list", int)
    if len(n_list) < 3:
        raise ConfigError("residual: need >= 3 points in n_list")
    s, sigma = float(c["s"]), float(c["sigma"])
    try:
        bounds = [rate_bound(s, sigma, n) for n in n_list]
        ApproxParams(int(c["omega"]), 1, s)
        n_modes = c["n_modes"] or 8 * max(n_list)
        if 8 * max(n_list) > n_modes:
            raise ValueError(f"resolution: n = {max(n_list)} exceeds N/8 = {n_modes // 8}")
        make_grid(n_modes)
    except ValueError as exc:
        raise ConfigError(f"residual: {exc}") from exc
    return c, n_list, s, sigma, bounds, n_modes


def cmd_residual(cfg: dict, out: Path, seed: int = 0, threads: int = 1) -> int:
    c, n_list, s, sigma, bounds, n_modes = _prepare_residual(cfg)
    out.mkdir(parents=True, exist_ok=True)
    fit = residual_rate_study(s, sigma, n_list, float(c["t"]), int(c["omega"]), n_modes)
    write_csv(
        out / "residual.csv",
        ["n", "norm_E", "rate_bound"],
        [(n, v, b) for (n, v), b in zip(fit.points, bounds)],
    )
    write_plot_script(out, "residual.csv", "n", ["norm_E", "rate_bound"], loglog=True)
    ok = fit.within(float(c["slope_tol"]))
    write_json(out / "rate_fit.json", {
        "command": "residual",
        "config": c,
        "seed": seed,
        "slope": tag(fit.slope, "measured"),
        "intercept": tag(fit.intercept, "measured"),
        "r_squared": tag(fit.r_squared, "measured"),
        "theoretical_slope": tag(fit.theoretical_slope, "paper-bound"),
        "branch": fit.branch,
        "points": tag([list(p) for p in fit.points], "measured"),
        "columns": {"n": "measured", "norm_E": "measured", "rate_bound": "paper-bound"},
        "within_tolerance": ok,
    })
    return EXIT_OK if ok else EXIT_PROPERTY


RATES_KEYS = {
    "s": 2.0, "sigma": None, "n_list": [8, 16, 32, 64], "t_probe": [0.1, 0.2, 0.3, 0.4, 0.5],
    "omega": 1, "slope_tol": 0.3, "solver": {},
}


@_config_errors
def _prepare_rates(cfg: dict):
    c = _strict(cfg, RATES_KEYS, "rates")
    n_list = _number_list(c["n_list"], "rates.n_list", int)
    t_probe = _number_list(c["t_probe"], "rates.t_probe")
    if len(n_list) < 3:
        raise ConfigError("rates: need >= 3 points in n_list")
    s = float(c["s"])
    sigma = default_sigma(s) if c["sigma"] is None else float(c["sigma"])
    solver = parse_solver(c["solver"], n_modes=max(512, 8 * max(n_list)))
    if 8 * max(n_list) > solver.n_modes:
        raise ConfigError(f"rates: resolution: n = {max(n_list)} exceeds N/8 = {solver.n_modes // 8}")
    if not t_probe or min(t_probe) <= 0:
        raise ConfigError("rates: t_probe must hold positive times")
    if s >= 2.0 and sigma != 1.0 or 1.5 < s < 2.0 and not 0.5 < sigma <= s - 1.0 or s <= 1.5:
        raise ConfigError("rates: sigma must be 1 for s >= 2, in (1/2, s-1] for 3/2 < s < 2")
    return c, n_list, t_probe, s, sigma, solver


def cmd_rates(cfg: dict, out: Path, seed: int = 0, threads: int = 1) -> int:
    c, n_list, t_probe, s, sigma, solver = _prepare_rates(cfg)
    out.mkdir(parents=True, exist_ok=True)
    try:
        fit = run_error_decay_study(s, sigma, n_list, t_probe, solver, int(c["omega"]), threads)
    except RuntimeError as exc:
        write_json(out / "rate_fit.json", {"command": "rates", "config": c, "status": str(exc)})
        return EXIT_BREAKDOWN
    write_csv(out / "rates.csv", ["n", "error"], fit.points)
    write_plot_script(out, "rates.csv", "n", ["error"], loglog=True)
    ok = fit.within(float(c["slope_tol"]))
    write_json(out / "rate_fit.json", {
        "command": "rates",
        "config": c,
        "seed": seed,
        "sigma": sigma,
        "slope": tag(fit.slope, "measured"),
        "intercept": tag(fit.intercept, "measured"),
        "r_squared": tag(fit.r_squared, "measured"),
        "theoretical_slope": tag(fit.theoretical_slope, "paper-bound"),
        "branch": fit.branch,
        "points": tag([list(p) for p in fit.points], "measured"),
        "columns": {"n": "measured", "error": "measured"},
        "within_tolerance": ok,
        "solver": asdict(solver),
    })
    return EXIT_OK if ok else EXIT_PROPERTY


NONUNIFORM_KEYS = {
    "s": 2.0, "n_list": [16, 32, 64], "t_grid": [0.25, 0.5, 0.75, 1.0],
    "epsilon": 0.02, "refine": True, "solver": {},
}


@_config_errors
def _prepare_nonuniform(cfg: dict):
    c = _strict(cfg, NONUNIFORM_KEYS, "nonuniform")
    n_list = _number_list(c["n_list"], "nonuniform.n_list", int)
    t_grid = _number_list(c["t_grid"], "nonuniform.t_grid")
    s = float(c["s"])
    if not s > 1.5:
        raise ConfigError("nonuniform: s must exceed 3/2")
    if not n_list or min(n_list) < 1:
        raise ConfigError("nonuniform: n_list must hold positive integers")
    if not t_grid or min(t_grid) < 0 or max(t_grid) <= 0:
        raise ConfigError("nonuniform: t_grid must be non-negative with a positive entry")
    solver = parse_solver(c["solver"], n_modes=512)
    if 8 * max(n_list) > solver.n_modes:
        raise ConfigError(f"nonuniform: resolution: n = {max(n_list)} exceeds N/8 = {solver.n_modes // 8}")
    return c, n_list, t_grid, s, solver


def cmd_nonuniform(cfg: dict, out: Path, seed: int = 0, threads: int = 1) -> int:
    c, n_list, t_grid, s, solver = _prepare_nonuniform(cfg)
    out.mkdir(parents=True, exist_ok=True)
    rep = run_nonuniform_study(s, n_list, t_grid, solver, float(c["epsilon"]), bool(c["refine"]), threads)
    margins = rep.margins()
    cells = rep.cell_ok()
    rows = []
    for i, n in enumerate(rep.n_list):
        for j, t in enumerate(rep.t_grid):
            rows.append((n, t, rep.gap_matrix[i][j], rep.lower_bound_matrix[i][j], margins[i, j]))
    write_csv(out / "gaps.csv", ["n", "t", "gap", "bound", "margin"], rows)
    write_plot_script(out, "gaps.csv", "t", ["gap", "bound"])
    breakdown = any(st != "completed" for st in rep.status)
    verdicts = [
        {"n": n, "t": t, "holds": bool(cells[i, j])}
        for i, n in enumerate(rep.n_list) for j, t in enumerate(rep.t_grid)
    ]
    write_json(out / "report.json", {
        "command": "nonuniform",
        "config": c,
        "seed": seed,
        "s": s,
        "n_list": rep.n_list,
        "t_grid": rep.t_grid,
        "horizon": rep.horizon,
        "epsilon": tag(rep.epsilon, "measured"),
        "gap_matrix": tag(rep.gap_matrix, "measured"),
        "lower_bound_matrix": tag(rep.lower_bound_matrix, "paper-bound"),
        "surrogate_gap_matrix": tag(rep.surrogate_gap_matrix, "closed-form"),
        "limit_lower_bound": tag(rep.limit_bound, "paper-bound"),
        "initial_gaps": tag(rep.initial_gaps, "measured"),
        "closed_form_initial_gaps": tag(rep.closed_form_initial_gaps, "closed-form"),
        "max_hs_norm": tag(rep.max_norm, "measured"),
        "initial_hs_norm": tag(rep.initial_norm, "measured"),
        "uniformly_bounded": rep.bounded,
        "interpolation_route_holds": rep.interpolation_ok,
        "refinement": {
            k: tag(v, "measured") if k in ("margin", "refined_margin") else v
            for k, v in rep.refinement.items()
        },
        "verdicts": verdicts,
        "status": rep.status,
        "columns": {"n": "measured", "t": "measured", "gap": "measured", "bound": "paper-bound", "margin": "measured"},
        "solver_fingerprint": rep.solver_fingerprint,
    })
    if breakdown:
        return EXIT_BREAKDOWN
    ok = bool(cells.all()) and rep.bounded and all(rep.interpolation_ok)
    ok &= not rep.refinement.get("violation_grew", False)
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_check(cfg: dict, out: Path, seed: int = 0, threads: int = 1) -> int:
    _strict(cfg, {}, "check")
    results = checks.run_all(seed)
    first = next((r.name for r in results if not r.passed), None)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "check.json", {
        "command": "check",
        "seed": seed,
        "passed": first is None,
        "first_failure": first,
        "results": [
            {**r.to_dict(), "worst": tag(r.worst, "measured"), "tolerance": tag(r.tolerance, "closed-form")}
            for r in results
        ],
    })
    if first is not None:
        print(f"property failed: {first}", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "residual": cmd_residual,
    "rates": cmd_rates,
    "nonuniform": cmd_nonuniform,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moderate-waves", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None, help="JSON config file")
    parser.add_argument("--output", type=Path, default=Path("output"), help="artifact directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    return parser


def load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args.output, args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
