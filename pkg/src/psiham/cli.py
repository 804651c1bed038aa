"""Command-line interface: ``psiham {solve,eval,verify,ml,figures}``.

Exit codes: 0 success, 1 verification over budget, 2 invalid input,
3 geometric resummation outside ``|1 + hbar| < 1``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import ConvergenceRegionError, PsiHamError
from .export import FIGURES, figure_table, format_value, parse_axis, tabulate
from .ham import HamConfig, ham_series
from .problems import App, ProblemSpec, make_problem
from .special import MlQuery, ml_series
from .terms import HamSeries
from .verify import (
    GridSpec,
    QuadParams,
    SeparableCandidate,
    load_tolerances,
    residual_budget,
    residual_norm,
)

EXIT_OK, EXIT_BUDGET, EXIT_USAGE, EXIT_REGION = 0, 1, 2, 3

_DEFAULTS = {"nu": 1.0, "rho0": 1.0, "g": 0.0}


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--problem", metavar="JSON", help="problem document (replaces the inline flags)")
    g.add_argument("--app", choices=[a.value for a in App])
    g.add_argument("--alpha", type=float, help="fractional order in (0, 1]")
    g.add_argument("--psi", default="identity", choices=["identity", "log"])
    g.add_argument("--a", type=float, default=None, help="lower terminal (default 0, or 1 for --psi log)")
    g.add_argument("--nu", type=float, help="viscosity of the tube problems (default 1)")
    g.add_argument("--P", type=float, help="pressure forcing of the tube-pressure problem")
    g.add_argument("--rho0", type=float, help="viscosity of the planar problem (default 1)")
    g.add_argument("--g", type=float, help="pressure-gradient constant of the planar problem (default 0)")


def _problem(args, alpha: float | None = None) -> ProblemSpec:
    if args.problem:
        if args.app:
            raise UsageError("give either --problem or --app, not both")
        with open(args.problem, encoding="utf-8") as fh:
            problem = ProblemSpec.from_json(json.load(fh))
        return problem if alpha is None else problem.with_alpha(alpha)
    if not args.app:
        raise UsageError("--app or --problem is required")
    app = App(args.app)
    alpha = args.alpha if args.alpha is not None else alpha
    if alpha is None:
        raise UsageError("--alpha is required")
    a = args.a if args.a is not None else (1.0 if args.psi == "log" else 0.0)
    params = {"alpha": alpha, "psi": args.psi, "a": a}
    names = {App.TUBE_PRESSURE: ("nu", "P"), App.TUBE: ("nu",), App.PLANAR: ("rho0", "g")}[app]
    for name in ("nu", "P", "rho0", "g"):
        value = getattr(args, name)
        if name in names:
            params[name] = _DEFAULTS.get(name) if value is None else value
        elif value is not None:
            raise UsageError(f"--{name} does not apply to --app {app.value}")
    return make_problem(app, **params)


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    problem = _problem(args)
    config = HamConfig(args.hbar, orders=args.orders, resum=args.resum, hbar2=args.hbar2, terms=args.terms)
    series = ham_series(problem, config)
    doc = {
        "problem": problem.to_json(),
        "config": {"hbar": config.hbar, "hbar2": config.hbar2, "orders": config.orders,
                   "resum": config.resum, "terms": config.terms},
        "series": series.to_json(),
    }
    _write(_dump(doc), args.output)
    return EXIT_OK


def _load_series(path: str) -> tuple[ProblemSpec, HamSeries]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return ProblemSpec.from_json(doc["problem"]), HamSeries.from_json(doc["series"])


def _axes(args, problem: ProblemSpec, defaults: dict[str, str]) -> list:
    names = ["x", "y", "t"] if problem.coupled else ["r", "t"]
    axes = []
    for name in names:
        text = getattr(args, name) or defaults.get(name)
        if text is None:
            raise UsageError(f"--{name} is required for --app {problem.app.value}")
        axes.append(parse_axis(name, text))
    for other in {"r", "x", "y"} - set(names):
        if getattr(args, other):
            raise UsageError(f"--{other} does not apply to --app {problem.app.value}")
    return axes


def cmd_eval(args) -> int:
    series = None
    if args.series:
        if args.problem or args.app:
            raise UsageError("--series carries its own problem; drop --app/--problem")
        problem, series = _load_series(args.series)
    else:
        first = args.alphas[0] if args.alphas else None
        problem = _problem(args, alpha=first)
    table = tabulate(problem, _axes(args, problem, {}), args.alphas, terms=args.terms,
                     series=series, orders_used=args.orders_used)
    for line in table.warnings:
        print(line, file=sys.stderr)
    _write(table.to_csv(), args.output)
    return EXIT_OK


def _grid(args, problem: ProblemSpec) -> GridSpec:
    a = problem.a
    defaults = ({"x": "0:6.283185307179586:20", "y": "0:6.283185307179586:20", "t": f"{a + 0.05!r}:{a + 1.0!r}:10"}
                if problem.coupled else {"r": "0.1:1:20", "t": f"{a + 0.05!r}:{a + 1.0!r}:20"})
    axes = _axes(args, problem, defaults)
    t = axes[-1]
    lo, hi = t.values[0], t.values[-1]
    if not lo > a:
        raise UsageError(f"residual grids must start after a={a}; got t from {lo}")
    if hi == lo:
        hi = lo * (1 + 1e-12) + 1e-12
    spatial = tuple((ax.values[0], ax.values[-1], len(ax.values)) for ax in axes[:-1])
    return GridSpec(problem.variant, spatial, a, lo - a, hi, len(t.values))


def cmd_verify(args) -> int:
    if args.series:
        if args.problem or args.app:
            raise UsageError("--series carries its own problem; drop --app/--problem")
        problem, candidate = _load_series(args.series)
    else:
        problem = _problem(args)
        candidate = SeparableCandidate.from_exact(problem, K=args.terms)
    tolerances = load_tolerances(args.tolerances)
    nodes = args.nodes or int(tolerances["residual"].get(problem.app.value, {}).get("nodes", 2048))
    budget = args.budget if args.budget is not None else residual_budget(problem, tolerances)
    report = residual_norm(problem, candidate, _grid(args, problem), QuadParams(nodes=nodes),
                           budget=budget, orders_used=args.orders_used)
    text = _dump(report.to_json()) if args.format == "json" else report.to_text()
    _write(text, args.output)
    return EXIT_OK if report.within_budget else EXIT_BUDGET


def cmd_ml(args) -> int:
    res = ml_series(MlQuery(args.alpha, args.z, args.tol, args.max_terms))
    sys.stdout.write(f"{format_value(res.value)}\n{res.terms}\n")
    return EXIT_OK


def cmd_figures(args) -> int:
    names = args.only or sorted(FIGURES)
    outdir = Path(args.outdir)
    for name in names:
        table = figure_table(name)
        for line in table.warnings:
            print(f"{name}: {line}", file=sys.stderr)
        _write(table.to_csv(), str(outdir / f"{name}.csv"))
        print(outdir / f"{name}.csv")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psiham", description="psi-Caputo Navier-Stokes series solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the homotopy series and write it as JSON")
    _add_problem_flags(p)
    p.add_argument("--hbar", type=float, default=-1.0)
    p.add_argument("--hbar2", type=float, help="second auxiliary parameter of the planar system")
    p.add_argument("--orders", type=int, default=3, help="truncation order M")
    p.add_argument("--resum", action="store_true", help="sum the (1 + hbar) families in closed form")
    p.add_argument("--terms", type=int, default=4, help="time powers kept by --resum")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="tabulate solution values as CSV")
    _add_problem_flags(p)
    p.add_argument("--alphas", type=_float_list, help="comma-separated orders, one value column each")
    p.add_argument("--terms", type=int, default=4, help="time powers kept by the tube series")
    p.add_argument("--series", metavar="JSON", help="evaluate a series written by 'solve'")
    p.add_argument("--orders-used", type=int)
    for axis in ("r", "x", "y", "t"):
        p.add_argument(f"--{axis}", help="value or inclusive range lo:hi:count")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="residual of a solution in its governing equations")
    _add_problem_flags(p)
    p.add_argument("--series", metavar="JSON", help="verify a series written by 'solve' instead of the exact solution")
    p.add_argument("--orders-used", type=int)
    p.add_argument("--terms", type=int, default=4, help="time powers kept by the tube solution")
    p.add_argument("--nodes", type=int, help="quadrature nodes (default from the tolerance file)")
    p.add_argument("--budget", type=float, help="sup-norm budget (default from the tolerance file)")
    p.add_argument("--tolerances", metavar="JSON", help="tolerance file (default $PSI_HAM_TOLERANCES or packaged)")
    for axis in ("r", "x", "y", "t"):
        p.add_argument(f"--{axis}", help="range lo:hi:count (t must start after a)")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ml", help="one-parameter Mittag-Leffler function")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-15)
    p.add_argument("--max-terms", type=int, default=1000)
    p.set_defaults(func=cmd_ml)

    p = sub.add_parser("figures", help="write the CSV data behind figures 1-6")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--only", nargs="+", choices=sorted(FIGURES))
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceRegionError as exc:
        print(f"psiham: {exc}", file=sys.stderr)
        return EXIT_REGION
    except (UsageError, PsiHamError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"psiham {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
