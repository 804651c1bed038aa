"""Independent checks of candidate solutions.

* :func:`residual_norm` plugs a candidate into its governing equations.  The
  fractional derivative is computed by quadrature; spatial derivatives come
  from the basis rules when the candidate is term-represented and from finite
  differences otherwise.
* :func:`series_oracle_compare` checks the recursion output against reference
  tables of the low-order iterates.
* :func:`initial_condition_check` evaluates a candidate at ``t = a``.

Budgets live in a versioned JSON file shipped with the package; the
``PSI_HAM_TOLERANCES`` environment variable points at a replacement.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, MismatchError, PsiHamError, StepError, VariantError
from .ham import HamConfig, ham_series
from .kernel import caputo_derivative_numeric
from .problems import App, ProblemSpec, initial_condition, tube_coefficient
from .special import gamma_eval, mittag_leffler
from .terms import (
    Cylindrical,
    HamSeries,
    Planar,
    SpatialExpr,
    TemporalPower,
    TermSum,
    cylindrical_operator,
    evaluate_spatial,
    planar_derivative,
    planar_laplacian,
)

__all__ = [
    "load_tolerances",
    "GridSpec",
    "QuadParams",
    "TimeFactor",
    "SeparableCandidate",
    "BlackBoxCandidate",
    "as_candidate",
    "EquationNorm",
    "PointFailure",
    "ResidualReport",
    "residual_norm",
    "OracleReport",
    "reference_iterates",
    "series_oracle_compare",
    "InitialConditionReport",
    "initial_condition_check",
]

TOLERANCE_ENV = "PSI_HAM_TOLERANCES"


def load_tolerances(path: str | os.PathLike | None = None) -> dict:
    """Budget file: explicit ``path``, else ``$PSI_HAM_TOLERANCES``, else the packaged one."""
    path = path or os.environ.get(TOLERANCE_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.loads(resources.files("psiham").joinpath("tolerances.json").read_text("utf-8"))
    if doc.get("version") != 1:
        raise DomainError(f"unsupported tolerance file version {doc.get('version')!r}")
    return doc


def residual_budget(problem: ProblemSpec, tolerances: dict | None = None) -> float:
    tol = tolerances or load_tolerances()
    if problem.alpha == 1.0:
        return float(tol["residual"]["classical"]["sup"])
    return float(tol["residual"][problem.app.value]["sup"])


# ---------------------------------------------------------------------------
# grids and quadrature parameters


def _axis(lo: float, hi: float, n: int) -> list[float]:
    if n < 1:
        raise DomainError(f"point count must be positive, got {n}")
    if n == 1:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, n)]


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid of spatial points and times on ``[a + eps, T]``.

    ``spatial`` is ``((r_min, r_max, n_r),)`` for cylindrical problems and
    ``((x_min, x_max, n_x), (y_min, y_max, n_y))`` for planar ones.  A count of
    1 pins that coordinate (its upper bound is ignored).
    """

    variant: str
    spatial: tuple
    a: float
    eps: float
    T: float
    n_t: int

    def __post_init__(self) -> None:
        if self.variant not in ("cylindrical", "planar"):
            raise VariantError(f"unknown grid variant {self.variant!r}")
        want = 1 if self.variant == "cylindrical" else 2
        if len(self.spatial) != want:
            raise DomainError(f"{self.variant} grid needs {want} spatial range(s)")
        for lo, hi, n in self.spatial:
            if n < 1 or (n > 1 and not hi > lo):
                raise DomainError(f"bad spatial range ({lo}, {hi}, {n})")
        if self.variant == "cylindrical" and not self.spatial[0][0] > 0.0:
            raise DomainError("cylindrical grids must keep r_min > 0 (the axis is singular)")
        if not self.eps > 0.0:
            raise DomainError("eps must be positive: t = a is excluded from residual grids")
        if not self.T > self.a + self.eps:
            raise DomainError(f"need T > a + eps, got T={self.T}, a+eps={self.a + self.eps}")
        if self.n_t < 1:
            raise DomainError("n_t must be positive")

    @classmethod
    def cylindrical(cls, a: float, r=(0.1, 1.0), n_r: int = 20, t_end: float | None = None,
                    n_t: int = 20, eps: float = 0.05) -> "GridSpec":
        return cls("cylindrical", ((float(r[0]), float(r[1]), int(n_r)),), float(a), float(eps),
                   float(a + 1.0 if t_end is None else t_end), int(n_t))

    @classmethod
    def planar(cls, a: float, x=(0.0, 2 * math.pi), n_x: int = 20, y=(0.0, 2 * math.pi), n_y: int = 20,
               t_end: float | None = None, n_t: int = 10, eps: float = 0.05) -> "GridSpec":
        return cls("planar", ((float(x[0]), float(x[1]), int(n_x)), (float(y[0]), float(y[1]), int(n_y))),
                   float(a), float(eps), float(a + 1.0 if t_end is None else t_end), int(n_t))

    @classmethod
    def for_problem(cls, problem: ProblemSpec, **kw) -> "GridSpec":
        maker = cls.planar if problem.coupled else cls.cylindrical
        return maker(problem.a, **kw)

    def points(self) -> list[tuple]:
        axes = [_axis(*rng) for rng in self.spatial]
        if self.variant == "cylindrical":
            return [(r,) for r in axes[0]]
        return [(x, y) for x in axes[0] for y in axes[1]]

    def times(self) -> list[float]:
        return _axis(self.a + self.eps, self.T, self.n_t)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "spatial": [list(s) for s in self.spatial],
                "a": self.a, "eps": self.eps, "T": self.T, "n_t": self.n_t}


@dataclass(frozen=True)
class QuadParams:
    """``nodes`` for the fractional quadrature, ``step`` for the classical
    (``alpha = 1``) time difference, ``fd_step`` for spatial finite differences
    of black-box candidates."""

    nodes: int = 2048
    step: float | None = None
    fd_step: float = 1e-3

    def __post_init__(self) -> None:
        if self.nodes < 3:
            raise StepError(f"quadrature needs at least 3 nodes, got {self.nodes}")
        if self.step is not None and not self.step > 0.0:
            raise StepError(f"time step must be positive, got {self.step}")
        if not self.fd_step > 0.0:
            raise StepError(f"finite-difference step must be positive, got {self.fd_step}")

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# candidates


class TimeFactor:
    """Scalar- or array-valued function of ``t`` built from ``X = psi(t) - psi(a)``."""

    def __init__(self, problem: ProblemSpec, of_x: Callable, label: str):
        self.problem = problem
        self.of_x = of_x
        self.label = label

    def __call__(self, t):
        p = self.problem
        if np.ndim(t) == 0:
            return float(self.of_x(np.asarray(p.psi.increment(p.a, float(t)))))
        return np.asarray(self.of_x(p.psi.increment_array(p.a, t)), dtype=float)

    @classmethod
    def power(cls, problem: ProblemSpec, tp: TemporalPower) -> "TimeFactor":
        beta = tp.beta(problem.alpha)
        if tp.is_constant:
            return cls(problem, lambda x: np.ones_like(x, dtype=float), "1")
        scale = 1.0 / gamma_eval(beta + 1.0)
        return cls(problem, lambda x: scale * np.power(x, beta), f"X^{beta:g}/Gamma({beta + 1:g})")

    @classmethod
    def mittag_leffler(cls, problem: ProblemSpec, rate: float) -> "TimeFactor":
        alpha = problem.alpha
        return cls(problem, lambda x: mittag_leffler(alpha, -rate * np.power(x, alpha)),
                   f"E_{alpha:g}(-{rate:g} X^{alpha:g})")


class SeparableCandidate:
    """Sum of ``spatial(point) * time(t)`` products for each unknown.

    Spatial parts are basis expressions, so their derivatives are exact.
    """

    def __init__(self, problem: ProblemSpec, u_parts: Sequence[tuple[SpatialExpr, TimeFactor]],
                 v_parts: Sequence[tuple[SpatialExpr, TimeFactor]] | None = None):
        if problem.coupled != (v_parts is not None):
            raise VariantError("coupled problems need u and v parts, single ones only u")
        for sp, _ in (*u_parts, *(v_parts or ())):
            if sp.variant != problem.variant:
                raise VariantError(f"{sp.variant} part in a {problem.variant} candidate")
        self.problem = problem
        self.u_parts = list(u_parts)
        self.v_parts = None if v_parts is None else list(v_parts)

    @classmethod
    def from_termsum(cls, problem: ProblemSpec, u: TermSum, v: TermSum | None = None) -> "SeparableCandidate":
        def split(s: TermSum):
            return [(sp, TimeFactor.power(problem, tp)) for tp, sp in sorted(s.parts().items())]

        return cls(problem, split(u), None if v is None else split(v))

    @classmethod
    def from_series(cls, problem: ProblemSpec, series: HamSeries, orders_used: int | None = None) -> "SeparableCandidate":
        summed = series.partial_sum(orders_used)
        if isinstance(summed, tuple):
            return cls.from_termsum(problem, *summed)
        return cls.from_termsum(problem, summed)

    @classmethod
    def from_exact(cls, problem: ProblemSpec, K: int = 4) -> "SeparableCandidate":
        """The closed-form solution; the tube series is truncated after ``K`` powers."""
        if problem.app is App.TUBE_PRESSURE:
            u = TermSum.of(Cylindrical({0: 1.0, 2: -1.0})) + TermSum.of(
                Cylindrical.constant(problem.P - 4.0 * problem.nu), TemporalPower(1))
            return cls.from_termsum(problem, u)
        if problem.app is App.TUBE:
            u = TermSum.of(Cylindrical.monomial(1))
            for k in range(1, K + 1):
                u = u + TermSum.of(
                    Cylindrical.monomial(1 - 2 * k, tube_coefficient(k) * problem.nu**k), TemporalPower(k))
            return cls.from_termsum(problem, u)
        envelope = TimeFactor.mittag_leffler(problem, 2.0 * problem.rho0)
        drift = TimeFactor.power(problem, TemporalPower(1))
        u_parts = [(Planar.sin(1, -1.0), envelope)]
        v_parts = [(Planar.sin(1, 1.0), envelope)]
        if problem.g != 0.0:
            u_parts.append((Planar.constant(problem.g), drift))
            v_parts.append((Planar.constant(-problem.g), drift))
        return cls(problem, u_parts, v_parts)

    def value(self, point, t: float):
        u = math.fsum(evaluate_spatial(sp, point) * f(t) for sp, f in self.u_parts)
        if self.v_parts is None:
            return u
        return u, math.fsum(evaluate_spatial(sp, point) * f(t) for sp, f in self.v_parts)

    def factors(self) -> list[TimeFactor]:
        seen: dict[int, TimeFactor] = {}
        for _, f in (*self.u_parts, *(self.v_parts or ())):
            seen.setdefault(id(f), f)
        return list(seen.values())


class BlackBoxCandidate:
    """Any callable ``f(point, t)``; derivatives by finite differences."""

    def __init__(self, problem: ProblemSpec, fn: Callable):
        self.problem = problem
        self.fn = fn

    def value(self, point, t: float):
        out = self.fn(tuple(point), float(t))
        if self.problem.coupled:
            u, v = out
            return float(u), float(v)
        return float(out)


def as_candidate(obj, problem: ProblemSpec, orders_used: int | None = None):
    if isinstance(obj, (SeparableCandidate, BlackBoxCandidate)):
        return obj
    if isinstance(obj, HamSeries):
        if obj.variant != problem.variant:
            raise VariantError("series and problem variants disagree")
        return SeparableCandidate.from_series(problem, obj, orders_used)
    if isinstance(obj, TermSum):
        return SeparableCandidate.from_termsum(problem, obj)
    if isinstance(obj, tuple) and len(obj) == 2 and all(isinstance(s, TermSum) for s in obj):
        return SeparableCandidate.from_termsum(problem, *obj)
    if callable(obj):
        return BlackBoxCandidate(problem, obj)
    raise VariantError(f"cannot interpret {type(obj).__name__} as a candidate solution")


# ---------------------------------------------------------------------------
# residuals


@dataclass
class EquationNorm:
    name: str
    sup: float
    rms: float
    worst_point: list[float] | None
    worst_t: float | None
    count: int


@dataclass
class PointFailure:
    point: list[float]
    t: float
    error: str
    message: str


@dataclass
class ResidualReport:
    problem: dict
    grid: dict
    quadrature: dict
    equations: list[EquationNorm]
    failures: list[PointFailure] = field(default_factory=list)
    ic_max_error: float = 0.0
    ic_ok: bool = True
    budget: float | None = None

    @property
    def sup(self) -> float:
        return max((e.sup for e in self.equations), default=0.0)

    @property
    def within_budget(self) -> bool:
        if self.failures:
            return False
        return self.budget is None or self.sup <= self.budget

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["sup"] = self.sup
        doc["within_budget"] = self.within_budget
        return doc

    def to_text(self) -> str:
        lines = [f"problem: {json.dumps(self.problem, sort_keys=True)}",
                 f"quadrature: {json.dumps(self.quadrature, sort_keys=True)}"]
        for e in self.equations:
            where = "-" if e.worst_point is None else f"point={e.worst_point} t={e.worst_t:.6g}"
            lines.append(f"{e.name}: sup={e.sup:.3e} rms={e.rms:.3e} worst at {where} ({e.count} samples)")
        lines.append(f"initial condition: max error {self.ic_max_error:.3e} ({'ok' if self.ic_ok else 'MISMATCH'})")
        if self.failures:
            lines.append(f"{len(self.failures)} grid point(s) failed to evaluate:")
            lines.extend(f"  {f.point} t={f.t:.6g}: {f.error}: {f.message}" for f in self.failures[:20])
        if self.budget is not None:
            verdict = "PASS" if self.within_budget else "FAIL"
            lines.append(f"budget {self.budget:.3e}: {verdict} (sup {self.sup:.3e})")
        return "\n".join(lines) + "\n"


def _time_derivative(problem: ProblemSpec, f: Callable, t: float, quad: QuadParams) -> float:
    if problem.alpha == 1.0:
        return caputo_derivative_numeric(1.0, f, problem.psi, problem.a, t, quad.step)
    return caputo_derivative_numeric(problem.alpha, f, problem.psi, problem.a, t, nodes=quad.nodes)


class _Accumulator:
    def __init__(self, name: str):
        self.name = name
        self.sup = 0.0
        self.sq = 0.0
        self.count = 0
        self.worst: tuple | None = None

    def add(self, value: float, point, t: float) -> None:
        a = abs(value)
        self.count += 1
        self.sq += a * a
        if self.worst is None or a > self.sup:
            self.sup, self.worst = a, (list(point), t)

    def result(self) -> EquationNorm:
        rms = math.sqrt(self.sq / self.count) if self.count else 0.0
        return EquationNorm(self.name, self.sup, rms, self.worst[0] if self.worst else None,
                            self.worst[1] if self.worst else None, self.count)


def _separable_residuals(problem: ProblemSpec, cand: SeparableCandidate, point, vals, ders):
    """Residuals at one point given ``vals``/``ders`` of every time factor."""

    def combine(parts, fn=None, use=vals):
        return math.fsum(evaluate_spatial(fn(sp) if fn else sp, point) * use[id(f)] for sp, f in parts)

    if not problem.coupled:
        du = combine(cand.u_parts, use=ders)
        lu = combine(cand.u_parts, cylindrical_operator)
        forcing = problem.P if problem.app is App.TUBE_PRESSURE else 0.0
        return [du - forcing - problem.nu * lu]
    u, v = combine(cand.u_parts), combine(cand.v_parts)
    carrier = u + v
    out = []
    for parts, sign in ((cand.u_parts, 1.0), (cand.v_parts, -1.0)):
        d = combine(parts, use=ders)
        grad = combine(parts, planar_derivative)
        lap = combine(parts, planar_laplacian)
        out.append(d + carrier * grad - problem.rho0 * lap - sign * problem.g)
    return out


def _blackbox_residuals(problem: ProblemSpec, cand: BlackBoxCandidate, point, t: float, quad: QuadParams):
    h = quad.fd_step
    point = tuple(point)
    if not problem.coupled:
        (r,) = point
        f = lambda rr: cand.value((rr,), t)  # noqa: E731
        c, p, m = f(r), f(r + h), f(r - h)
        lap = (p - 2.0 * c + m) / h**2 + (p - m) / (2.0 * h * r)
        du = _time_derivative(problem, lambda tau: cand.value(point, tau), t, quad)
        forcing = problem.P if problem.app is App.TUBE_PRESSURE else 0.0
        return [du - forcing - problem.nu * lap]
    x, y = point
    c = cand.value(point, t)
    px, mx = cand.value((x + h, y), t), cand.value((x - h, y), t)
    py, my = cand.value((x, y + h), t), cand.value((x, y - h), t)
    history: dict[float, tuple] = {}

    def component(tau, i):
        # both equations share one pass over the time samples
        if tau not in history:
            history[tau] = cand.value(point, tau)
        return history[tau][i]

    out = []
    for i, sign in ((0, 1.0), (1, -1.0)):
        dx = (px[i] - mx[i]) / (2.0 * h)
        dy = (py[i] - my[i]) / (2.0 * h)
        lap = (px[i] + mx[i] + py[i] + my[i] - 4.0 * c[i]) / h**2
        d = _time_derivative(problem, lambda tau, i=i: component(float(tau), i), t, quad)
        out.append(d + c[0] * dx + c[1] * dy - problem.rho0 * lap - sign * problem.g)
    return out


def residual_norm(problem: ProblemSpec, candidate, grid: GridSpec | None = None,
                  quad: QuadParams | None = None, *, budget: float | None = None,
                  orders_used: int | None = None) -> ResidualReport:
    """Sup and RMS norms of ``LHS - RHS`` of each governing equation over ``grid``.

    Evaluation errors at a grid point are recorded in ``failures`` and the
    point is left out of the norms; a report with failures is never within
    budget.
    """
    grid = grid or GridSpec.for_problem(problem)
    quad = quad or QuadParams()
    if grid.variant != problem.variant:
        raise VariantError("grid and problem variants disagree")
    if grid.a != problem.a:
        raise DomainError(f"grid starts at a={grid.a}, problem at a={problem.a}")
    cand = as_candidate(candidate, problem, orders_used)
    names = ["u", "v"] if problem.coupled else ["u"]
    acc = [_Accumulator(n) for n in names]
    failures: list[PointFailure] = []
    points = grid.points()
    for t in grid.times():
        if isinstance(cand, SeparableCandidate):
            try:
                vals = {id(f): f(t) for f in cand.factors()}
                ders = {id(f): _time_derivative(problem, f, t, quad) for f in cand.factors()}
            except PsiHamError as exc:
                failures.extend(PointFailure(list(p), t, type(exc).__name__, str(exc)) for p in points)
                continue
        for p in points:
            try:
                if isinstance(cand, SeparableCandidate):
                    res = _separable_residuals(problem, cand, p, vals, ders)
                else:
                    res = _blackbox_residuals(problem, cand, p, t, quad)
            except (PsiHamError, ArithmeticError, ValueError) as exc:
                failures.append(PointFailure(list(p), t, type(exc).__name__, str(exc)))
                continue
            for a, r in zip(acc, res):
                a.add(r, p, t)
    ic = initial_condition_check(cand, problem, grid)
    return ResidualReport(problem.to_json(), grid.to_dict(), quad.to_dict(), [a.result() for a in acc],
                          failures, ic.max_error, ic.ok, budget)


# ---------------------------------------------------------------------------
# initial condition


@dataclass
class InitialConditionReport:
    ok: bool
    max_error: float
    tolerance: float
    worst_point: list[float] | None

    def __bool__(self) -> bool:
        return self.ok


def initial_condition_check(candidate, problem: ProblemSpec, grid: GridSpec | None = None,
                            tolerance: float | None = None) -> InitialConditionReport:
    """Compare the candidate at ``t = a`` with the prescribed data on the spatial grid."""
    tol = float(load_tolerances()["initial_condition"]) if tolerance is None else tolerance
    grid = grid or GridSpec.for_problem(problem)
    cand = as_candidate(candidate, problem)
    worst, where = 0.0, None
    for p in grid.points():
        try:
            got = cand.value(p, problem.a)
        except (PsiHamError, ArithmeticError, ValueError):
            return InitialConditionReport(False, math.inf, tol, list(p))
        want = initial_condition(problem, p)
        got, want = np.atleast_1d(got), np.atleast_1d(want)
        err = float(np.max(np.abs(np.asarray(got, float) - np.asarray(want, float))))
        if where is None or err > worst:
            worst, where = err, list(p)
    return InitialConditionReport(worst <= tol, worst, tol, where)


# ---------------------------------------------------------------------------
# reference tables of the low-order iterates


def _cyl(*rows) -> TermSum:
    out = TermSum.zero("cylindrical")
    for k, n, c in rows:
        out = out + TermSum.of(Cylindrical.monomial(n, c), TemporalPower(k))
    return out


def _pl(*rows) -> TermSum:
    out = TermSum.zero("planar")
    for k, sp in rows:
        out = out + TermSum.of(sp, TemporalPower(k))
    return out


def reference_iterates(problem: ProblemSpec, hbar: float, hbar2: float | None = None) -> list:
    """Hand-transcribed iterates ``u_0 .. u_M`` (pairs when coupled) with the
    auxiliary parameter(s) instantiated numerically.

    The planar table omits convection terms that only vanish when
    ``hbar2 == hbar``.
    """
    h = hbar
    q = 1.0 + h
    if problem.app is App.TUBE_PRESSURE:
        c = problem.P - 4.0 * problem.nu
        return [
            _cyl((0, 0, 1.0), (0, 2, -1.0)),
            _cyl((1, 0, -h * c)),
            _cyl((1, 0, -q * h * c)),
            _cyl((1, 0, -q**2 * h * c)),
        ]
    if problem.app is App.TUBE:
        nu = problem.nu
        return [
            _cyl((0, 1, 1.0)),
            _cyl((1, -1, -h * nu)),
            _cyl((1, -1, -q * h * nu), (2, -3, h**2 * nu**2)),
            _cyl((1, -1, -q**2 * h * nu), (2, -3, 2 * q * h**2 * nu**2), (3, -5, -9 * h**3 * nu**3)),
            _cyl((1, -1, -q**3 * h * nu), (2, -3, 3 * q**2 * h**2 * nu**2),
                 (3, -5, -27 * q * h**3 * nu**3), (4, -7, 225 * h**4 * nu**4)),
        ]
    h2 = h if hbar2 is None else hbar2
    q2 = 1.0 + h2
    rho, g = problem.rho0, problem.g
    sin, one = Planar.sin, Planar.constant
    u = [
        _pl((0, sin(1, -1.0))),
        _pl((1, sin(1, -2 * h * rho)), (1, one(-h * g))),
        _pl((1, sin(1, -2 * q * h * rho)), (2, sin(1, -(2 * h * rho) ** 2)), (1, one(-q * h * g))),
        _pl((1, sin(1, -2 * q**2 * h * rho)), (2, sin(1, -8 * q * (h * rho) ** 2)),
            (3, sin(1, -(2 * h * rho) ** 3)), (1, one(-q**2 * h * g))),
    ]
    v = [
        _pl((0, sin(1, 1.0))),
        _pl((1, sin(1, 2 * h2 * rho)), (1, one(h2 * g))),
        _pl((1, sin(1, 2 * q2 * h2 * rho)), (2, sin(1, (2 * h2 * rho) ** 2)), (1, one(q2 * h2 * g))),
        _pl((1, sin(1, 2 * q2**2 * h2 * rho)), (2, sin(1, 8 * q2 * (h2 * rho) ** 2)),
            (3, sin(1, (2 * h2 * rho) ** 3)), (1, one(q2**2 * h2 * g))),
    ]
    return list(zip(u, v))


@dataclass
class OracleReport:
    app: str
    M: int
    hbar: float
    hbar2: float | None
    compared_orders: list[int]
    max_deviation: float
    per_order: list[dict]
    zero_orders: list[int]
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_json(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def _offenders(m: int, field_name: str, got: TermSum, want: TermSum, tol: float) -> list[dict]:
    bad = []
    keys = set(got.parts()) | set(want.parts())
    for tp in sorted(keys):
        dev = got.spatial_at(tp).max_abs_diff(want.spatial_at(tp))
        if dev > tol:
            bad.append({"order": m, "field": field_name, "k": tp.k, "j": tp.j, "deviation": dev,
                        "got": str(got.spatial_at(tp)), "expected": str(want.spatial_at(tp))})
    return bad


def series_oracle_compare(problem: ProblemSpec, M: int, hbar: float, hbar2: float | None = None,
                          tolerance: float | None = None) -> OracleReport:
    """Run the recursion to order ``M`` and compare against :func:`reference_iterates`.

    Orders past the end of the table are generated but not compared.  Raises
    :class:`MismatchError` listing every offending order and term.
    """
    if not 0 <= M <= 8:
        raise DomainError(f"oracle comparison is limited to M <= 8, got {M}")
    tol = float(load_tolerances()["oracle_coefficient"]) if tolerance is None else tolerance
    series = ham_series(problem, HamConfig(hbar, orders=M, hbar2=hbar2))
    table = reference_iterates(problem, hbar, hbar2)
    compared = list(range(min(M, len(table) - 1) + 1))
    per_order, offenders, zero = [], [], []
    for m in compared:
        if problem.coupled:
            pairs = [("u", series.u[m], table[m][0]), ("v", series.v[m], table[m][1])]
        else:
            pairs = [("u", series.u[m], table[m])]
        dev = 0.0
        for name, got, want in pairs:
            dev = max(dev, got.max_abs_diff(want))
            offenders.extend(_offenders(m, name, got, want, tol))
        if all(got.is_zero() for _, got, _ in pairs):
            zero.append(m)
        per_order.append({"order": m, "max_deviation": dev})
    worst = max((p["max_deviation"] for p in per_order), default=0.0)
    report = OracleReport(problem.app.value, M, hbar, hbar2, compared, worst, per_order, zero, tol)
    if offenders:
        raise MismatchError(
            f"{len(offenders)} term(s) deviate from the reference iterates by up to {worst:.3e}", offenders)
    return report
