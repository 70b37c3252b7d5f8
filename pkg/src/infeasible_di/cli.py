"""Command-line front end.

Exit codes: 0 success (non-converged runs included), 1 numerical failure,
2 usage error, 3 problem not in the regime the command needs.

Every subcommand accepts ``--config FILE`` holding ``key=value`` lines with
the same names as the long flags (``gamma=0.9``, ``case-study=true``);
flags given on the command line win.  Files are written below
``--out-dir``, which defaults to ``$INFEASIBLE_DI_OUTPUT_DIR`` or the
current directory.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from dataclasses import replace

import numpy as np

from .analytic import GENERALIZED, PLAIN, NewtonConfig, TwoPiece, asymptotic_ts, best_approx
from .dr import STOP_RULES, DRConfig, dr_solve, sweep
from .exceptions import DoubleIntegratorError, RegimeError
from .grid import write_grid_csv
from .portrait import (
    DEFAULT_C1_RANGE,
    DEFAULT_TS_RANGE,
    PortraitSpec,
    portrait,
    write_portrait_csv,
    write_portrait_pgm,
)
from .problem import CASE_STUDY, BoundaryData, ProblemInstance, classify, critical_bound

OUTPUT_DIR_ENV = "INFEASIBLE_DI_OUTPUT_DIR"
SEED_BOUNDS = (2.0, 1.5, 1.0, 0.5, 0.1)
GRID_BOUNDS = (0.1, 0.5, 1.0, 1.5, 2.0)
GRID_SIZES = (1000, 10_000, 100_000)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_REGIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _method(text):
    key = text.lower()
    if key in ("plain", "newton"):
        return PLAIN
    if key in ("gen", "generalized", "generalised"):
        return GENERALIZED
    raise argparse.ArgumentTypeError(f"unknown method {text!r} (use plain or gen)")


def _pair(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return lo, hi


def _resolution(text):
    try:
        nx, ny = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}")
    return nx, ny


def _values(text):
    """``lo:hi:count`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        try:
            lo, hi, count = text.split(":")
            return [float(v) for v in np.linspace(float(lo), float(hi), int(count))]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}")
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")


def _add_boundary(p):
    g = p.add_argument_group("boundary data")
    for name in ("s0", "sf", "v0", "vf"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument(
        "--case-study", action="store_true", help="use s0=sf=vf=0, v0=1 for any flag not given"
    )


def _add_common(p):
    p.add_argument("--config", help="key=value file with flag defaults")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out-dir", default=None)


def _add_dr_flags(p):
    p.add_argument("--n", type=int, default=1000, help="grid nodes")
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--frac", type=float, default=0.999)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--stop-on", choices=STOP_RULES, default="shadow")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="infeasible-di",
        description="Best approximation control for the infeasible double integrator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critical", help="critical control bound a_c")
    _add_common(p)
    _add_boundary(p)

    p = sub.add_parser("solve", help="analytic best approximation control")
    _add_common(p)
    _add_boundary(p)
    p.add_argument("--a", type=float)
    p.add_argument("--limit", action="store_true", help="report the a -> 0 limit")
    p.add_argument("--seed-table1", action="store_true", help=f"CSV for a in {SEED_BOUNDS}")
    p.add_argument("--method", type=_method, default=PLAIN)
    p.add_argument("--max-iter", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--ts0", type=float)
    p.add_argument("--c10", type=float)

    p = sub.add_parser("dr", help="Douglas-Rachford run")
    _add_common(p)
    _add_boundary(p)
    p.add_argument("--a", type=float)
    _add_dr_flags(p)
    p.add_argument("--bench", type=int, default=0, help="average wall time over R runs")
    p.add_argument("--grid-csv", help="dump the final box iterate to this CSV")
    p.add_argument("--table2", action="store_true", help="grid of runs over --n-list x --a-list")
    p.add_argument("--a-list", type=_values, default=list(GRID_BOUNDS))
    p.add_argument("--n-list", type=_values, default=list(GRID_SIZES))

    p = sub.add_parser("sweep", help="Douglas-Rachford iterations over (gamma, lambda)")
    _add_common(p)
    _add_boundary(p)
    p.add_argument("--a", type=float)
    _add_dr_flags(p)
    p.add_argument("--gammas", type=_values)
    p.add_argument("--lambdas", type=_values)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(format="csv")

    p = sub.add_parser("portrait", help="Newton iteration-count portrait")
    _add_common(p)
    _add_boundary(p)
    p.add_argument("--a", type=float)
    p.add_argument("--method", type=_method, default=PLAIN)
    p.add_argument("--res", type=_resolution, default=(200, 200), help="n_ts x n_c1")
    p.add_argument("--ts-range", type=_pair, default=DEFAULT_TS_RANGE)
    p.add_argument("--c1-range", type=_pair, default=DEFAULT_C1_RANGE)
    p.add_argument("--cap", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--r", type=float, help="control value on the first arc (default from the analytic solution)")
    p.add_argument("--prefix", help="output file stem")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def read_config(path):
    """Translate ``key=value`` lines into command-line tokens."""
    tokens = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            low = value.lower()
            if low in ("true", "yes", "on"):
                tokens.append(flag)
            elif low in ("false", "no", "off"):
                continue
            else:
                tokens.append(f"{flag}={value}")
    return tokens


def _with_config(argv, commands):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    extra = read_config(known.config)
    for i, tok in enumerate(argv):
        if tok in commands:
            return argv[: i + 1] + extra + argv[i + 1 :]
    return argv


def _boundary(args):
    values = {}
    for name in ("s0", "sf", "v0", "vf"):
        v = getattr(args, name)
        if v is None and args.case_study:
            v = getattr(CASE_STUDY, name)
        if v is None:
            raise UsageError(f"--{name} is required (or pass --case-study)")
        values[name] = v
    return BoundaryData(**values)


def _problem(args):
    if args.a is None:
        raise UsageError("--a is required")
    try:
        return ProblemInstance(_boundary(args), args.a)
    except ValueError as exc:
        raise UsageError(str(exc))


def _out_path(args, name):
    base = args.out_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, name)


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _dr_config(args):
    try:
        return DRConfig(
            gamma=args.gamma,
            lam=args.lam,
            eps=args.eps,
            frac=args.frac,
            max_iter=args.max_iter,
            n=args.n,
            stop_on=args.stop_on,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _require_infeasible(p):
    fc = classify(p)
    if not fc.infeasible:
        raise RegimeError(f"problem is {fc.kind.value}: a={p.a} >= a_c={fc.a_c}")
    return fc


def cmd_critical(args):
    res = critical_bound(_boundary(args))
    if args.format == "csv":
        t_c = "" if res.t_c is None else f"{res.t_c:.17g}"
        sys.stdout.write(f"a_c,t_c,case\n{res.a_c:.17g},{t_c},{res.case_tag}\n")
        return EXIT_OK
    out = {"a_c": res.a_c}
    if res.t_c is not None:
        out["t_c"] = res.t_c
    out["case"] = res.case_tag
    _emit_json(out)
    return EXIT_OK


def _solution_dict(p, cfg, y0=None):
    fc = _require_infeasible(p)
    control, gap, trace = best_approx(p, cfg, y0)
    out = {"a": p.a, "a_c": fc.a_c, "r": control.r}
    if isinstance(control, TwoPiece):
        out.update(kind="two_piece", ts=control.ts)
    else:
        out.update(kind="constant", ts=None)
    out.update(
        c1=gap.c1,
        c2=gap.c2,
        iterations=trace.iterations,
        converged=trace.converged,
        residual=trace.residual_history[-1] if trace.residual_history else None,
    )
    return out


def cmd_solve(args):
    b = _boundary(args)
    if args.limit:
        ts, c1, c2 = asymptotic_ts(b)
        out = {"ts": ts, "c1": c1, "c2": c2}
        if args.format == "csv":
            sys.stdout.write(f"ts,c1,c2\n{ts:.17g},{c1:.17g},{c2:.17g}\n")
        else:
            _emit_json(out)
        return EXIT_OK
    try:
        cfg = NewtonConfig(args.max_iter, args.tol, args.method)
    except ValueError as exc:
        raise UsageError(str(exc))
    y0 = None
    if args.ts0 is not None or args.c10 is not None:
        if args.ts0 is None or args.c10 is None:
            raise UsageError("--ts0 and --c10 go together")
        y0 = (args.ts0, args.c10)
    if args.seed_table1:
        lines = ["a,c1,c2,ts"]
        for a in SEED_BOUNDS:
            s = _solution_dict(ProblemInstance(b, a), cfg, y0)
            ts = "" if s["ts"] is None else f"{s['ts']:.15f}"
            lines.append(f"{a:g},{s['c1']:.15f},{s['c2']:.15f},{ts}")
        sys.stdout.write("\n".join(lines) + "\n")
        return EXIT_OK
    s = _solution_dict(_problem(args), cfg, y0)
    if args.format == "csv":
        keys = list(s)
        sys.stdout.write(",".join(keys) + "\n")
        sys.stdout.write(",".join(_csv_cell(s[k]) for k in keys) + "\n")
    else:
        _emit_json(s)
    return EXIT_OK


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _reference_ts(p):
    try:
        control, _, _ = best_approx(p)
    except DoubleIntegratorError:
        return None
    return control.ts if isinstance(control, TwoPiece) else None


def cmd_dr(args):
    cfg = _dr_config(args)
    if args.table2:
        return _table2(args, cfg)
    p = _problem(args)
    report = dr_solve(p, cfg)
    out = report.to_dict()
    if args.bench > 0:
        times = [report.wall_time] + [dr_solve(p, cfg).wall_time for _ in range(args.bench - 1)]
        out["bench_runs"] = args.bench
        out["mean_wall_time_s"] = statistics.fmean(times)
    if args.grid_csv:
        path = _out_path(args, args.grid_csv)
        write_grid_csv(report.u_tilde, path)
        out["grid_csv"] = path
    if args.format == "csv":
        keys = ["iterations", "converged", "ts_estimate", "c1", "c2", "wall_time_s"]
        row = dict(out, c1=report.gap.c1, c2=report.gap.c2)
        sys.stdout.write(",".join(keys) + "\n" + ",".join(_csv_cell(row[k]) for k in keys) + "\n")
    else:
        _emit_json(out)
    return EXIT_OK


def _table2(args, cfg):
    b = _boundary(args)
    header = ["N", "a", "iterations", "converged", "ts", "ts_error"]
    if args.bench > 0:
        header.append("cpu_time_s")
    lines = [",".join(header)]
    for n in args.n_list:
        for a in args.a_list:
            p = ProblemInstance(b, a)
            run_cfg = replace(cfg, n=int(n))
            rep = dr_solve(p, run_cfg)
            ref = _reference_ts(p)
            err = None if ref is None or rep.ts_estimate is None else abs(rep.ts_estimate - ref)
            row = [f"{int(n)}", f"{a:g}", str(rep.iterations), str(rep.converged),
                   _csv_cell(rep.ts_estimate), _csv_cell(err)]
            if args.bench > 0:
                times = [rep.wall_time] + [
                    dr_solve(p, run_cfg).wall_time for _ in range(args.bench - 1)
                ]
                row.append(f"{statistics.fmean(times):.3e}")
            lines.append(",".join(row))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sweep(args):
    p = _problem(args)
    cfg = _dr_config(args)
    gammas = args.gammas if args.gammas is not None else [cfg.gamma]
    lambdas = args.lambdas if args.lambdas is not None else [cfg.lam]
    if not gammas or not lambdas:
        raise UsageError("gamma and lambda lists must not be empty")
    try:
        rows = sweep(p, gammas, lambdas, cfg, jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.format == "json":
        text = json.dumps(
            [{"gamma": r.gamma, "lambda": r.lam, "iterations": r.iterations,
              "converged": r.converged} for r in rows],
            indent=2,
        ) + "\n"
    else:
        text = "gamma,lambda,iterations,converged\n" + "".join(
            f"{r.gamma:.17g},{r.lam:.17g},{r.iterations},{r.converged}\n" for r in rows
        )
    if args.out:
        with open(_out_path(args, args.out), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_portrait(args):
    p = _problem(args)
    _require_infeasible(p)
    r = args.r
    if r is None:
        control, _, _ = best_approx(p)
        r = control.r if isinstance(control, TwoPiece) else -p.a
    try:
        spec = PortraitSpec(
            r=r,
            ts_range=args.ts_range,
            c1_range=args.c1_range,
            resolution=args.res,
            method=args.method,
            cap=args.cap,
            tol=args.tol,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    grid = portrait(p, spec, jobs=args.jobs)
    stem = args.prefix or f"portrait_a{p.a:g}_{spec.method}"
    csv_path = _out_path(args, stem + ".csv")
    pgm_path = _out_path(args, stem + ".pgm")
    write_portrait_csv(grid, csv_path)
    write_portrait_pgm(grid, pgm_path)
    _emit_json(
        {
            "csv": csv_path,
            "pgm": pgm_path,
            "r": r,
            "method": spec.method,
            "resolution": list(spec.resolution),
            "converged_cells": grid.converged_cells,
            "total_cells": int(grid.counts.size),
        }
    )
    return EXIT_OK


COMMANDS = {
    "critical": cmd_critical,
    "solve": cmd_solve,
    "dr": cmd_dr,
    "sweep": cmd_sweep,
    "portrait": cmd_portrait,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _with_config(argv, COMMANDS)
    except (OSError, UsageError) as exc:
        parser.print_usage(sys.stderr)
        print(f"infeasible-di: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"infeasible-di {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegimeError as exc:
        print(f"infeasible-di {args.command}: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except DoubleIntegratorError as exc:
        print(f"infeasible-di {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
