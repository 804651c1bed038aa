"""Tabulation of solutions on grids and the figure presets.

A grid axis is either a single value or an inclusive range ``lo:hi:count``.
Only range-valued axes become CSV columns; fixed coordinates are part of the
preset or the command line that produced the table.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError, SingularPointError
from .problems import ProblemSpec, exact_solution, make_problem
from .terms import HamSeries, series_eval

__all__ = [
    "Axis",
    "parse_axis",
    "Table",
    "tabulate",
    "format_value",
    "FigurePreset",
    "FIGURES",
    "figure_table",
    "column",
]


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]
    is_range: bool

    @property
    def fixed(self) -> float:
        return self.values[0]


def parse_axis(name: str, text: str) -> Axis:
    """``"0.1"`` is a fixed value, ``"1:5:100"`` an inclusive range of 100 points."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return Axis(name, (float(parts[0]),), False)
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError("count must be positive")
            if n > 1 and not hi > lo:
                raise ValueError("range must be increasing")
            vals = (lo,) if n == 1 else tuple(float(v) for v in np.linspace(lo, hi, n))
            return Axis(name, vals, True)
    except ValueError as exc:
        raise ParameterError(f"--{name} {text!r}: {exc}") from None
    raise ParameterError(f"--{name} {text!r}: expected a number or lo:hi:count")


def format_value(v: float) -> str:
    return f"{v:.12g}"


@dataclass
class Table:
    header: list[str]
    rows: list[list[str]]
    warnings: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()


def _alpha_label(alpha: float) -> str:
    return f"alpha={alpha:g}"


def tabulate(problem: ProblemSpec, axes: Sequence[Axis], alphas: Sequence[float] | None = None,
             terms: int = 4, series: HamSeries | None = None, orders_used: int | None = None) -> Table:
    """Values on the tensor grid spanned by ``axes`` (spatial axes first, ``t`` last).

    Without ``series`` the closed-form solution is tabulated once per entry of
    ``alphas``; with it, the series is evaluated at its own order.
    """
    names = [a.name for a in axes]
    want = ["x", "y", "t"] if problem.coupled else ["r", "t"]
    if names != want:
        raise ParameterError(f"{problem.app.value} needs axes {want}, got {names}")
    t_axis = axes[-1]
    if min(t_axis.values) < problem.a:
        raise DomainError(f"times must not precede a={problem.a}")
    if series is not None:
        if alphas:
            raise ParameterError("a stored series fixes alpha; --alphas does not apply")
        if series.variant != problem.variant:
            raise ParameterError("series and problem variants disagree")
        evaluators = [(f"alpha={series.alpha:g}",
                       lambda pt, t: series_eval(series, problem.psi, problem.a, pt, t, orders_used))]
    else:
        alphas = list(alphas or [problem.alpha])
        evaluators = []
        for alpha in alphas:
            spec = problem.with_alpha(alpha)
            evaluators.append((_alpha_label(alpha),
                               lambda pt, t, spec=spec: exact_solution(spec, pt, t, K=terms)))

    shown = [a for a in axes if a.is_range] or list(axes)
    header = [a.name for a in shown]
    for label, _ in evaluators:
        header += [f"u({label})", f"v({label})"] if problem.coupled else [f"u({label})"]

    rows, warnings = [], []
    for idx in np.ndindex(*[len(a.values) for a in axes]):
        coords = [a.values[i] for a, i in zip(axes, idx)]
        point, t = tuple(coords[:-1]), coords[-1]
        row = [format_value(c) for a, c in zip(axes, coords) if a in shown]
        for label, fn in evaluators:
            width = 2 if problem.coupled else 1
            try:
                val = fn(point, t)
            except SingularPointError as exc:
                where = ", ".join(f"{n}={format_value(c)}" for n, c in zip(names, coords))
                warnings.append(f"warning: singular point {where} ({label}): {exc}")
                row += [""] * width
                continue
            vals = val if problem.coupled else (val,)
            row += [format_value(v) if math.isfinite(v) else "" for v in vals]
        rows.append(row)
    return Table(header, rows, warnings)


@dataclass(frozen=True)
class FigurePreset:
    """Problem parameters, grid axes and alpha family of one published figure."""

    name: str
    app: str
    params: dict
    axes: tuple[tuple[str, str], ...]
    alphas: tuple[float, ...]
    terms: int = 4
    note: str = ""

    def problem(self) -> ProblemSpec:
        return make_problem(self.app, alpha=self.alphas[0], **self.params)

    def grid(self) -> list[Axis]:
        return [parse_axis(n, spec) for n, spec in self.axes]


_TUBE_P = {"psi": "log", "a": 1.0, "P": 1.0, "nu": 1.0}
_TUBE = {"psi": "log", "a": 1.0, "nu": 1.0}
_PLANAR = {"psi": "log", "a": 1.0, "rho0": 1.0, "g": 0.0}
_TWO_PI = "6.283185307179586"

FIGURES: dict[str, FigurePreset] = {
    p.name: p
    for p in (
        FigurePreset("fig1", "tube-pressure", _TUBE_P, (("r", "0:1:41"), ("t", "1:5:41")), (1.0, 0.8, 0.5),
                     note="surface of the forced tube solution"),
        FigurePreset("fig2", "tube-pressure", _TUBE_P, (("r", "0.1"), ("t", "1:5:100")), (1.0, 0.8, 0.5),
                     note="forced tube solution at r = 0.1"),
        FigurePreset("fig3", "tube", _TUBE, (("r", "0.1:1:41"), ("t", "1:2:41")), (1.0, 0.75, 0.5),
                     note="four-term tube series; the axis r = 0 is singular and excluded"),
        FigurePreset("fig4", "tube", _TUBE, (("r", "0.1"), ("t", "1:2:100")), (1.0, 0.75, 0.5),
                     note="four-term tube series at r = 0.1"),
        FigurePreset("fig5", "planar", _PLANAR, (("x", f"0:{_TWO_PI}:41"), ("y", f"0:{_TWO_PI}:41"), ("t", "2")),
                     (1.0, 0.7, 0.4), note="planar velocity field at t = 2"),
        FigurePreset("fig6", "planar", _PLANAR, (("x", f"0:{_TWO_PI}:100"), ("y", "0.2"), ("t", "2")),
                     (1.0, 0.7, 0.4), note="planar velocity field at y = 0.2, t = 2"),
    )
}


def figure_table(name: str) -> Table:
    try:
        preset = FIGURES[name]
    except KeyError:
        raise ParameterError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}") from None
    return tabulate(preset.problem(), preset.grid(), preset.alphas, terms=preset.terms)


def column(table: Table, name: str) -> np.ndarray:
    """Numeric column by header name; empty cells become NaN."""
    i = table.header.index(name)
    return np.array([float(r[i]) if r[i] else math.nan for r in table.rows])

