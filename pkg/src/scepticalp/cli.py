"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 infeasible target.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, is_dataclass

from . import calibration, combination, core, design, figures, simulation
from .data import ANALYSIS_FIELDS, analyze_studies, format_row, load_studies
from .exceptions import InfeasibleError, ScepticalError
from .methods import Method
from .numerics import Tolerance, std_normal_quantile

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3, 4


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _plain(value):
    if is_dataclass(value):
        value = asdict(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _emit(args, rows, out):
    """Write a list of flat dicts as text, CSV or JSON."""
    rows = [_plain(r) for r in rows]
    if args.format == "json":
        if len(rows) == 1 and not getattr(args, "force_list", False):
            out.write(json.dumps(rows[0], sort_keys=False) + "\n")
        else:
            for row in rows:
                out.write(json.dumps(row, sort_keys=False) + "\n")
    elif args.format == "csv":
        writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    else:
        for i, row in enumerate(rows):
            if i:
                out.write("\n")
            width = max(len(k) for k in row)
            for key, value in row.items():
                if isinstance(value, float):
                    value = f"{value:.6g}"
                out.write(f"{key:<{width}}  {value}\n")


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------

def _z_from(args, z_name, p_name, required=True):
    z, p = getattr(args, z_name), getattr(args, p_name)
    if z is not None and p is not None:
        raise UsageError(f"give only one of --{z_name.replace('_', '-')} and --{p_name.replace('_', '-')}")
    if z is not None:
        return z
    if p is not None:
        return -std_normal_quantile(p)
    if required:
        raise UsageError(f"one of --{z_name.replace('_', '-')} or --{p_name.replace('_', '-')} is required")
    return None


def _tol(args):
    return Tolerance(abs_tol=args.tol) if args.tol else None


def _method(value):
    try:
        return Method.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_ps(args):
    pair = core.StudyPair(_z_from(args, "zo", "po"), _z_from(args, "zr", "pr"), args.c)
    res = core.sceptical_pvalues(pair)
    row = asdict(res)
    row.update(c=args.c, p_max=pair.p_max,
               p_infinity=core.p_infinity(pair),
               p_s_star_infinity=core.p_infinity(pair, controlled=True),
               success=res.p_s_star <= args.alpha)
    return [row]


def cmd_calibrate(args):
    return [calibration.calibrate_gamma_c(args.alpha, args.c)]


def cmd_t1e(args):
    gamma = args.gamma if args.gamma is not None else calibration.gamma_c(args.alpha, args.c)
    if args.kind == "overall":
        return [{"gamma": gamma, "c": args.c, "overall_t1e": calibration.overall_t1e(gamma, args.c)}]
    if args.kind == "partial":
        side = calibration.NullSide(args.side)
        q = calibration.T1eQuery(gamma, args.c, args.drift, side)
        return [{"gamma": gamma, "c": args.c, "drift": args.drift, "null_side": side,
                 "partial_t1e": calibration.partial_t1e(q), "bound": gamma}]
    z_o = _z_from(args, "zo", "po")
    return [{"alpha": args.alpha, "c": args.c, "z_o": z_o,
             "conditional_t1e": calibration.conditional_t1e_z(z_o, args.c, args.alpha)}]


def cmd_power(args):
    z_o = _z_from(args, "zo", "po")
    value = design.power(z_o, args.c, args.alpha, args.method, args.kind.upper())
    return [{"kind": args.kind, "method": args.method, "z_o": z_o, "c": args.c,
             "alpha": args.alpha, "power": value}]


def cmd_samplesize(args):
    req = design.DesignRequest(_z_from(args, "zo", "po"), args.alpha, args.power,
                               args.kind.upper(), args.method)
    return [design.required_relative_sample_size(req, tol=_tol(args))]


def cmd_projectpower(args):
    q = design.ProjectPowerQuery(args.alpha, args.power, args.c, args.method)
    return [{"alpha": args.alpha, "original_power": args.power, "c": args.c,
             "method": args.method, "mu": q.mu, "project_power": design.project_power(q)}]


def cmd_region(args):
    row = {"method": args.method, "alpha": args.alpha, "c": args.c,
           "area": combination.region_area(args.method, args.alpha, args.c),
           "partial_t1e_bound": combination.partial_t1e_bound(args.method, args.alpha, args.c)}
    if args.po is not None:
        row["p_o"] = args.po
        row["p_r_boundary"] = combination.region_boundary(args.method, args.po, args.alpha, args.c)
    if args.pr is not None and args.po is not None and args.method is not Method.SCEPTICAL_CONTROLLED:
        verdict = combination.combine(args.method, args.po, args.pr)
        row.update(p_r=args.pr, statistic=verdict.statistic,
                   p_overall_scale=verdict.p_overall_scale,
                   success=verdict.success_at(args.alpha))
    return [row]


def cmd_analyze(args):
    rows = analyze_studies(load_studies(args.path), args.alpha)
    if args.format == "text":
        return [format_row(r) | ({"note": r.note} if r.note else {}) for r in rows]
    args.force_list = True
    return [{k: getattr(r, k) for k in ANALYSIS_FIELDS} for r in rows]


def cmd_figure(args):
    params = {"alpha": args.alpha}
    if args.n_grid:
        params["n_grid"] = args.n_grid
    args.force_list = True
    if args.format == "text":
        args.format = "csv"
    return [asdict(r) for r in figures.emit_figure_data(args.figure, params)]


def _sim_config(args):
    cfg = {}
    if args.config:
        text = args.config
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"simulation config is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("simulation config must be a JSON object")
    for key in ("truth", "mu", "method"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    cfg.setdefault("alpha", args.alpha)
    cfg.setdefault("c", args.c)
    if args.nrep is not None:
        cfg["n_rep"] = args.nrep
    if args.seed is not None:
        cfg["seed"] = args.seed
    if isinstance(cfg.get("method"), Method):
        cfg["method"] = cfg["method"].value
    unknown = set(cfg) - set(simulation.SimConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown simulation settings: {', '.join(sorted(unknown))}")
    return simulation.SimConfig(**cfg)


def cmd_simulate(args):
    config = _sim_config(args)
    result = simulation.simulate_rate(config)
    if args.format == "json" or args.format == "text":
        args.out.write(simulation.to_json_line(result, config) + "\n")
        return []
    row = {**_plain(config), **_plain(result)}
    row["ci95"] = f"{result.ci95[0]:.6g};{result.ci95[1]:.6g}"
    return [row]


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.025,
                        help="one-sided significance level (default 0.025)")
    common.add_argument("--c", type=float, default=1.0, help="variance ratio / relative sample size")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--nrep", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="root-finding tolerance")
    common.set_defaults(format="text")

    parser = argparse.ArgumentParser(
        prog="scepticalp",
        description="Sceptical p-values, calibration, error rates, power and design "
                    "for replication studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    def add_zo(p):
        p.add_argument("--zo", type=float, help="original z-value")
        p.add_argument("--po", type=float, help="original one-sided p-value")

    p = add("ps", cmd_ps, "sceptical p-values of a study pair")
    add_zo(p)
    p.add_argument("--zr", type=float, help="replication z-value")
    p.add_argument("--pr", type=float, help="replication one-sided p-value")

    add("calibrate", cmd_calibrate, "controlled success level gamma_c")

    p = add("t1e", cmd_t1e, "overall, partial or conditional Type-I error")
    p.add_argument("kind", choices=("overall", "partial", "conditional"))
    p.add_argument("--gamma", type=float, help="success level (default: controlled level)")
    p.add_argument("--drift", type=float, default=0.0, help="mean z-value of the non-null study")
    p.add_argument("--side", default="ORIGINAL_NULL",
                   choices=("ORIGINAL_NULL", "REPLICATION_NULL"), help="which study is null")
    add_zo(p)

    p = add("power", cmd_power, "conditional or predictive power of a replication")
    p.add_argument("kind", choices=("conditional", "predictive"))
    add_zo(p)
    p.add_argument("--method", type=_method, default=Method.SCEPTICAL_CONTROLLED)

    p = add("samplesize", cmd_samplesize, "relative sample size for a target power")
    add_zo(p)
    p.add_argument("--power", type=float, default=0.8, help="target power")
    p.add_argument("--kind", choices=("conditional", "predictive"), default="conditional")
    p.add_argument("--method", type=_method, default=Method.SCEPTICAL_CONTROLLED)

    p = add("projectpower", cmd_projectpower, "power of original and replication together")
    p.add_argument("--power", type=float, default=0.8, help="power of the original study")
    p.add_argument("--method", type=_method, default=Method.SCEPTICAL_CONTROLLED)

    p = add("region", cmd_region, "success region of a method in the (p_o, p_r) square")
    p.add_argument("--method", type=_method, default=Method.SCEPTICAL_CONTROLLED)
    p.add_argument("--po", type=float, help="original p-value for the boundary")
    p.add_argument("--pr", type=float, help="replication p-value to combine with --po")

    p = add("analyze", cmd_analyze, "analyse a CSV of study pairs (study,r_o,n_o,r_r,n_r)")
    p.add_argument("path")

    p = add("figure", cmd_figure, "emit data for a figure as rows (figure, series, x, y)")
    p.add_argument("figure", choices=[f.value for f in figures.Figure])
    p.add_argument("--n-grid", type=int, default=None)

    p = add("simulate", cmd_simulate, "Monte Carlo success rate; prints one JSON line")
    p.add_argument("config", nargs="?", help="JSON object or path to a JSON file")
    p.add_argument("--truth", choices=[t.value for t in simulation.Truth])
    p.add_argument("--mu", type=float)
    p.add_argument("--method", type=_method)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.out = out
    try:
        rows = args.func(args)
        if rows:
            _emit(args, rows, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.supremum is not None:
            print(f"supremum: {exc.supremum:.6g}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ScepticalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
