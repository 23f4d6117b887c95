"""Command-line entry point: ``limcyc <command> ...``.

Exit codes are part of the interface: 0 success, 2 parse or usage error,
3 internal or integration failure, 4 no cycle where one was required.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .certify import VerdictKind, trapping_radius
from .cycle import CycleOptions, find_cycle, return_map_slope
from .dynamics import DormandPrince, IntegratorOptions
from .errors import (
    CycleNotConverged,
    IntegrationError,
    NoBracketError,
    ParseError,
)
from .model import BUILTIN_MODELS, ETBA_TEMPLATE, builtin_model, model_from_source
from .pipeline import analyze, certify_report, cycle_seed
from .svg import plot_svg, render_svg
from .verify import epsilon_sweep, epsilon_sweep_csv

EXIT_OK, EXIT_PARSE, EXIT_INTERNAL, EXIT_NO_CYCLE = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _parse_params(items):
    params = {}
    for item in items or ():
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            key, sep, value = piece.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"--param expects k=v, got {piece!r}")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise UsageError(f"--param {key.strip()}: {value!r} is not a number") from None
    return params


def _model(args):
    params = _parse_params(args.param)
    if args.model:
        return builtin_model(args.model, params)
    if args.phi is None:
        raise UsageError("one of --phi or --model is required")
    return model_from_source(args.phi, params)


def _cycle_options(args):
    kw = {"rel_tol": args.rel_tol, "abs_tol": args.abs_tol}
    if args.t_max is not None:
        kw["t_max"] = args.t_max
    for v in (args.rel_tol, args.abs_tol):
        if not 1e-14 <= v <= 1e-2:
            raise UsageError("tolerances must lie in [1e-14, 1e-2]")
    return CycleOptions(**kw)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- commands -------------------------------------------------------------------

def cmd_certify(args):
    m = _model(args)
    rep = certify_report(m, n_theta=args.n_theta)
    _emit(rep.dumps(include_timings=not args.no_timings), args.out)
    return EXIT_OK


def cmd_analyze(args):
    m = _model(args)
    rep = analyze(m, n_theta=args.n_theta, options=_cycle_options(args),
                  force_cycle=args.force_cycle, sweep=not args.no_sweep)
    _emit(rep.dumps(include_timings=not args.no_timings), args.out)
    if args.svg:
        if rep.cycle is not None:
            plot_svg(rep, args.svg)
        elif rep.trapping.exists:
            _svg_disk_only(rep, args.svg)
        else:
            print("limcyc: nothing to plot, no cycle and no trapping disk", file=sys.stderr)
    wanted = args.force_cycle or rep.verdict.kind is VerdictKind.EXISTS_UNIQUE
    if wanted and rep.cycle is None:
        print(f"limcyc: no cycle: {rep.checks.get('cycle_error', 'search failed')}",
              file=sys.stderr)
        return EXIT_NO_CYCLE
    return EXIT_OK


def _svg_disk_only(rep, path):
    # no cycle to highlight: show the disk around a short orbit from its rim
    m = model_from_source(rep.phi_source, rep.parameters)
    u = _run(m, 2.0 * rep.trapping.sigma, 0.0, 20.0, IntegratorOptions(), io.StringIO())[0]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg([u], None, rep.trapping.sigma, title=f"phi = {rep.phi_source}"))


def _run(m, x0, y0, t_end, opts, stream):
    """Integrate while streaming CSV rows; returns ``(points, error)``."""
    solver = DormandPrince(m.rhs, 0.0, [x0, y0], opts.sign * t_end, opts.rel_tol, opts.abs_tol,
                           opts.max_step)
    stream.write("t,x,y,V,Vdot\n")
    pts = []

    def row(t, u):
        x, y = float(u[0]), float(u[1])
        vals = (float(t), x, y, 0.5 * (x * x + y * y), -y * y * m.phi(x, y))
        stream.write(",".join(f"{v:.17g}" for v in vals) + "\n")
        pts.append((x, y))

    row(solver.t, solver.u)
    try:
        while solver.step():
            row(solver.t, solver.u)
    except IntegrationError as exc:
        return np.array(pts), exc
    return np.array(pts), None


def cmd_simulate(args):
    m = _model(args)
    for v in (args.x0, args.y0, args.t_end):
        if not math.isfinite(v):
            raise UsageError("initial state and t_end must be finite")
    opts = IntegratorOptions(rel_tol=args.rel_tol, abs_tol=args.abs_tol, t_end=args.t_end,
                             direction="reverse" if args.reverse else "forward")
    buf = io.StringIO()
    _, err = _run(m, args.x0, args.y0, args.t_end, opts, buf)
    _emit(buf.getvalue(), args.out)
    if err is not None:
        print(f"limcyc: integration failed: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_cycle(args):
    m = _model(args)
    options = _cycle_options(args)
    x_init = args.x_init
    if x_init is None:
        x_init = cycle_seed(trapping_radius(m))
    try:
        c = find_cycle(m, x_init, options)
    except (NoBracketError, CycleNotConverged, IntegrationError) as exc:
        print(f"limcyc: no cycle: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NO_CYCLE
    if args.format == "csv":
        buf = io.StringIO()
        c.samples_csv(buf)
        _emit(buf.getvalue(), args.out)
    else:
        doc = {"phi_source": m.source, "parameters": dict(m.params), "x_init": x_init,
               "cycle": c.to_json(), "return_map_slope": return_map_slope(m, c.x_star, options=options)}
        _emit(_dumps(doc), args.out)
    if args.svg:
        _cycle_svg(c, m, args.svg)
    return EXIT_OK


def _cycle_svg(c, m, path):
    sigma = trapping_radius(m)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg([], c.samples, sigma.sigma if sigma.exists else None,
                            title=f"phi = {m.source}"))


def cmd_sweep(args):
    if args.model and args.model != "etba":
        raise UsageError("sweep needs a template in eps; only --model etba provides one")
    template = args.phi or ETBA_TEMPLATE
    try:
        eps = [float(v) for v in args.eps.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--eps expects a comma-separated list of numbers, got {args.eps!r}") from None
    entries = epsilon_sweep(template, eps, _cycle_options(args))
    if args.format == "csv":
        buf = io.StringIO()
        epsilon_sweep_csv(entries, buf)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dumps({"template": template, "entries": [e.to_json() for e in entries]}), args.out)
    return EXIT_OK


def _read_trajectory_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise UsageError(f"{path}: empty trajectory")
    return np.array([[float(r["x"]), float(r["y"])] for r in rows])


def cmd_plot(args):
    from .report import AnalysisReport

    if not args.out:
        raise UsageError("plot needs --out")
    trajs = [_read_trajectory_csv(p) for p in args.trajectory or ()]
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            rep = AnalysisReport.loads(fh.read())
        plot_svg(rep, args.out, trajectories=trajs)
    else:
        if not trajs:
            raise UsageError("plot needs --report or at least one --trajectory")
        plot_svg(trajs, args.out)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def _add_model_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--phi", metavar="EXPR", help="damping polynomial in x, y and parameters")
    g.add_argument("--model", choices=sorted(BUILTIN_MODELS), help="built-in model")
    p.add_argument("--param", action="append", metavar="K=V",
                   help="parameter binding; repeatable, comma-separated lists allowed")


def _add_num_args(p, t_max=True):
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    if t_max:
        p.add_argument("--t-max", type=float, default=None,
                       help="give up on a section return after this long")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="limcyc",
        description="Certify and locate limit cycles of x'' + x' phi(x, x') + x = 0.")
    parser.add_argument("--version", action="version", version=f"limcyc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="star-shape, trapping, divisor and origin certificates")
    _add_model_args(p)
    p.add_argument("--n-theta", type=int, default=256)
    p.add_argument("--out")
    p.add_argument("--no-timings", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("analyze", help="certificates, cycle, sweep and checks as one report")
    _add_model_args(p)
    _add_num_args(p)
    p.add_argument("--n-theta", type=int, default=256)
    p.add_argument("--out")
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--force-cycle", action="store_true",
                   help="search for a cycle even without an ExistsUnique verdict")
    p.add_argument("--no-sweep", action="store_true", help="skip the uniqueness sweep")
    p.add_argument("--svg", metavar="PATH", help="also write a phase portrait")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="trajectory CSV t,x,y,V,Vdot")
    _add_model_args(p)
    _add_num_args(p, t_max=False)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--reverse", action="store_true", help="integrate backwards in time")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cycle", help="locate the cycle through the section y = 0, x > 0")
    _add_model_args(p)
    _add_num_args(p)
    p.add_argument("--x-init", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("sweep", help="cycle amplitude, period and stability across eps")
    _add_model_args(p)
    _add_num_args(p)
    p.add_argument("--eps", required=True, help="comma-separated eps values in (0, 10]")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG phase portrait from a report and/or trajectory CSVs")
    p.add_argument("--report", metavar="PATH")
    p.add_argument("--trajectory", action="append", metavar="CSV")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"limcyc: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001, the exit code is the contract
        print(f"limcyc: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
