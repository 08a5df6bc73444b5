"""Command-line front end: validate, map, grid, eval, simulate.

Exit codes: 0 success, 1 domain failure (invalid workspace, no convergence,
missing or stale cache, no run converged), 2 I/O or parse failure.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import scenarios
from .cache import load_cache, save_cache
from .exceptions import CacheFormatError, ConfNavError, NonConvergenceError
from .geometry import point_in_free_space, validate_workspace, workspace_from_dict
from .koebe import evaluate_with_derivative, fit_circles, jacobian_from_derivative, run_koebe
from .navigation import (make_params, phi_kr, pullback_gradient, sphere_world_grid,
                         workspace_grid)
from .simulation import ControlParams, FailedRun, batch_simulate

log = logging.getLogger("confnav")

PRESETS = {
    "paper-sec6": {
        "nodes": 256, "tol": 1e-13, "max_iter": 50, "k": 6, "gain": 1.0, "mass": 1.0,
        "lambdas": [0.0, 3.2, 5.0], "goal": [0.0, 0.0],
    },
}
DEFAULTS = {"nodes": 256, "tol": 1e-13, "max_iter": 50, "k": 6, "gain": 1.0,
            "mass": 1.0, "lambdas": [3.2], "goal": [0.0, 0.0]}


class UsageError(Exception):
    """Bad input files or arguments (exit code 2)."""


class DomainFailure(Exception):
    """A well-formed request that cannot be satisfied (exit code 1)."""


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------

def _setting(args, name):
    v = getattr(args, name, None)
    if v is not None:
        return v
    if args.preset:
        return PRESETS[args.preset][name]
    return DEFAULTS[name]


def load_workspace_schema(spec):
    """A JSON file path, or the name of a built-in workspace."""
    if spec is None:
        raise UsageError("--workspace is required")
    if os.path.exists(spec):
        try:
            with open(spec) as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{spec}: malformed JSON ({exc})") from None
    if spec in scenarios.BUILTIN:
        return scenarios.BUILTIN[spec]()
    raise UsageError(f"{spec}: no such file or built-in workspace "
                     f"({', '.join(sorted(scenarios.BUILTIN))})")


def _workspace(args):
    schema = load_workspace_schema(args.workspace)
    if not isinstance(schema, dict):
        raise UsageError("workspace file must hold a JSON object")
    try:
        return workspace_from_dict(schema, n_nodes=_setting(args, "nodes"))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"cannot parse workspace: {exc}") from None


def _cache_path(args, ws):
    if args.cache:
        return args.cache
    name = ws.schema.get("name") or os.path.splitext(os.path.basename(args.workspace))[0]
    return os.path.join(args.out, f"{name}.cache.npz")


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load_or_build(args, ws):
    path = _cache_path(args, ws)
    tol = _setting(args, "tol")
    if not os.path.exists(path):
        if getattr(args, "build", False):
            return _build(args, ws, path)[:2]
        raise DomainFailure(f"cache {path} not found; run 'confnav map' first")
    return load_cache(path, workspace=ws, tol=tol)


def _build(args, ws, path):
    report = validate_workspace(ws)
    if not report.ok:
        raise DomainFailure("invalid workspace: " + "; ".join(report.violations))
    tol = _setting(args, "tol")
    cm, rep = run_koebe(ws, tol=tol, max_iter=_setting(args, "max_iter"))
    sw = fit_circles(cm)
    if os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
    save_cache(cm, sw, path, tol)
    return cm, sw, rep


def _point(values, what):
    if values is None:
        return None
    if len(values) != 2:
        raise UsageError(f"{what} needs two numbers")
    return complex(values[0], values[1])


def _goal(args):
    g = _point(args.goal, "--goal")
    return complex(*_setting(args, "goal")) if g is None else g


def _print_json(doc):
    print(json.dumps(doc, indent=2))


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_validate(args):
    ws = _workspace(args)
    report = validate_workspace(ws)
    _print_json({"valid": report.ok, "violations": report.violations,
                 "n_obstacles": ws.n_obstacles, "n_nodes": ws.n_nodes})
    return 0 if report.ok else 1


def cmd_map(args):
    ws = _workspace(args)
    report = validate_workspace(ws)
    if not report.ok:
        _print_json({"valid": False, "violations": report.violations})
        return 1
    path = _cache_path(args, ws)
    try:
        cm, sw, rep = _build(args, ws, path)
    except NonConvergenceError as exc:
        doc = exc.report.to_dict() if exc.report else {}
        doc["error"] = str(exc)
        _print_json(doc)
        return 1
    doc = rep.to_dict()
    doc["final_delta"] = cm.final_delta
    doc["n_stages"] = len(cm.stages)
    doc["sphere_world"] = sw.to_dict()
    doc["cache"] = path
    _print_json(doc)
    return 0


def cmd_grid(args):
    ws = _workspace(args)
    cm, sw = _load_or_build(args, ws)
    goal = _goal(args)
    nav = make_params(cm, goal, k=_setting(args, "k"))
    if args.space == "sphere":
        grid = sphere_world_grid(sw, nav, n=args.resolution)
    else:
        grid = workspace_grid(cm, sw, nav, n=args.resolution, bbox=args.bounds)
    out = _out_dir(args)
    path = os.path.join(out, f"grid_{args.space}.{args.format}")
    if args.format == "csv":
        grid.to_csv(path)
    else:
        grid.to_json(path)
    minima = grid.local_minima()
    am = grid.argmin()
    doc = {"file": path, "space": args.space, "resolution": args.resolution,
           "phi_min": float(np.nanmin(grid.phi)), "phi_max": float(np.nanmax(grid.phi)),
           "argmin": [am.real, am.imag],
           "local_minima": [[float(grid.x[i]), float(grid.y[j])] for j, i in minima]}
    if len(minima) > 1:
        log.warning("%d grid-local minima found; consider a larger k", len(minima))
    _print_json(doc)
    return 0


def cmd_eval(args):
    ws = _workspace(args)
    cm, sw = _load_or_build(args, ws)
    z = _point(args.point, "--point")
    if not point_in_free_space(ws, z):
        raise DomainFailure(f"point {z} is not in the free space")
    t, d = evaluate_with_derivative(cm, z)
    goal = _goal(args)
    nav = make_params(cm, goal, k=_setting(args, "k"))
    _print_json({"point": [z.real, z.imag], "T": [t.real, t.imag],
                 "dT": [d.real, d.imag], "jacobian": jacobian_from_derivative(d).tolist(),
                 "phi": float(phi_kr(sw, nav, t)),
                 "pullback_gradient": pullback_gradient(cm, sw, nav, z).tolist()})
    return 0


def _default_starts(ws):
    if ws.schema.get("name") == "scenario2":
        return [scenarios.SCENARIO2_START]
    return list(scenarios.SCENARIO1_STARTS)


def cmd_simulate(args):
    ws = _workspace(args)
    cm, sw = _load_or_build(args, ws)
    goal = _goal(args)
    nav = make_params(cm, goal, k=_setting(args, "k"))
    starts = [complex(*s) for s in args.start] if args.start else []
    if not starts and args.preset:
        starts = [complex(*s) for s in _default_starts(ws)]
    if not starts:
        print("no start points given", file=sys.stderr)
        return 1
    lambdas = [0.0] if args.model == "kinematic" else _setting(args, "lambdas")
    out = _out_dir(args)
    summary = []
    any_ok = False
    for lam in lambdas:
        ctrl = ControlParams(gain_K=_setting(args, "gain"), mass_m=_setting(args, "mass"),
                             lam=lam, step_dt=args.dt, max_steps=args.max_steps,
                             goal_tol=args.goal_tol)
        runs = batch_simulate(cm, sw, nav, ctrl, starts, model=args.model)
        for i, run in enumerate(runs):
            tag = f"{args.model}_{i}" + (f"_lam{lam:g}" if args.model == "dynamic" else "")
            if isinstance(run, FailedRun):
                summary.append({"run": tag, "start": [run.start.real, run.start.imag],
                                "outcome": "error", "error": run.error})
                continue
            path = os.path.join(out, f"traj_{tag}.csv")
            run.to_csv(path)
            rec = {"run": tag, "file": path, "lambda": lam, **run.summary()}
            summary.append(rec)
            any_ok |= run.outcome == "converged"
    spath = os.path.join(out, f"summary_{args.model}.json")
    with open(spath, "w") as fh:
        json.dump(summary, fh, indent=2)
    _print_json({"summary": spath, "runs": [
        {k: r[k] for k in ("run", "outcome") if k in r} for r in summary]})
    return 0 if any_ok else 1


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="confnav", description=__doc__.splitlines()[0])
    p.add_argument("--workspace", help="workspace JSON file or built-in name")
    p.add_argument("--nodes", type=int, help="nodes per curve (power of two, default 256)")
    p.add_argument("--tol", type=float, help="Koebe stopping tolerance (default 1e-13)")
    p.add_argument("--max-iter", dest="max_iter", type=int,
                   help="Koebe iteration cap (default 50)")
    p.add_argument("--cache", help="cache file (default OUT/<workspace>.cache.npz)")
    p.add_argument("--out", default="confnav_out", help="output directory")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", help="check the workspace invariants")
    sub.add_parser("map", help="build and cache the transformation")

    def nav_opts(sp):
        sp.add_argument("--goal", type=float, nargs=2, metavar=("X", "Y"))
        sp.add_argument("--k", type=int, help="navigation exponent (default 6)")
        sp.add_argument("--build", action="store_true",
                        help="build the transformation if the cache is missing")

    g = sub.add_parser("grid", help="export phi on a grid")
    nav_opts(g)
    g.add_argument("--space", choices=["workspace", "sphere"], default="workspace")
    g.add_argument("--resolution", type=int, default=200)
    g.add_argument("--bounds", type=float, nargs=4,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    g.add_argument("--format", choices=["csv", "json"], default="csv")

    e = sub.add_parser("eval", help="evaluate T, T' and the control at one point")
    nav_opts(e)
    e.add_argument("--point", type=float, nargs=2, metavar=("X", "Y"), required=True)

    s = sub.add_parser("simulate", help="run closed-loop simulations")
    nav_opts(s)
    s.add_argument("--model", choices=["kinematic", "dynamic"], default="kinematic")
    s.add_argument("--start", type=float, nargs=2, action="append", metavar=("X", "Y"))
    s.add_argument("--gain", type=float, help="gain K (default 1)")
    s.add_argument("--mass", type=float, help="mass m (default 1)")
    s.add_argument("--lambda", dest="lambdas", type=float, nargs="+",
                   help="damping value(s) for the dynamic model (default 3.2)")
    s.add_argument("--dt", type=float, help="nominal step size (default 0.05, reduced near obstacles)")
    s.add_argument("--max-steps", dest="max_steps", type=int, default=5000)
    s.add_argument("--goal-tol", dest="goal_tol", type=float, default=1e-3)
    return p


COMMANDS = {"validate": cmd_validate, "map": cmd_map, "grid": cmd_grid,
            "eval": cmd_eval, "simulate": cmd_simulate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, CacheFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainFailure, ConfNavError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
