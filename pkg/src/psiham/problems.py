"""The three time-fractional Navier-Stokes test problems and their exact solutions.

* ``tube-pressure``: ``D u = P + nu (u_rr + u_r / r)``, ``u(r, a) = 1 - r^2``;
* ``tube``: the same without forcing, ``u(r, a) = r``;
* ``planar``: the coupled system in ``x, y`` with constant pressure term ``g``,
  ``u(x, y, a) = -sin(x + y)``, ``v(x, y, a) = sin(x + y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

from .errors import DomainError, ParameterError, SingularPointError
from .kernel import FracOrder
from .psi import PsiKind, PsiSpec
from .special import gamma_eval, mittag_leffler
from .terms import Cylindrical, Planar, TermSum

__all__ = [
    "App",
    "ProblemSpec",
    "make_problem",
    "exact_solution",
    "initial_guess",
    "initial_condition",
    "odd_double_factorial",
    "tube_coefficient",
]


class App(str, Enum):
    TUBE_PRESSURE = "tube-pressure"
    TUBE = "tube"
    PLANAR = "planar"

    @property
    def variant(self) -> str:
        return "planar" if self is App.PLANAR else "cylindrical"


_REQUIRED = {
    App.TUBE_PRESSURE: ("alpha", "psi", "a", "nu", "P"),
    App.TUBE: ("alpha", "psi", "a", "nu"),
    App.PLANAR: ("alpha", "psi", "a", "rho0", "g"),
}


@dataclass(frozen=True)
class ProblemSpec:
    app: App
    alpha: float
    psi: PsiSpec
    a: float
    nu: float | None = None
    P: float | None = None
    rho0: float | None = None
    g: float | None = None

    @property
    def variant(self) -> str:
        return self.app.variant

    @property
    def coupled(self) -> bool:
        return self.app is App.PLANAR

    def params(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in _REQUIRED[self.app]}

    def with_alpha(self, alpha: float) -> "ProblemSpec":
        return make_problem(self.app, **{**self.params(), "alpha": alpha})

    def to_json(self) -> dict:
        doc = {"app": self.app.value}
        for name, value in self.params().items():
            doc[name] = value.to_dict()["kind"] if name == "psi" else float(value)
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "ProblemSpec":
        doc = dict(doc)
        try:
            app = App(doc.pop("app"))
        except (KeyError, ValueError) as exc:
            raise ParameterError(f"missing or unknown 'app' in problem document: {exc}") from None
        return make_problem(app, **doc)


def make_problem(app, **params) -> ProblemSpec:
    """Validate ``params`` against the application and build a :class:`ProblemSpec`."""
    try:
        app = App(app)
    except ValueError:
        raise ParameterError(f"unknown application {app!r}") from None
    required = set(_REQUIRED[app])
    given = {k for k, v in params.items() if v is not None}
    missing = sorted(required - given)
    extra = sorted(given - required)
    if missing or extra:
        raise ParameterError(f"{app.value}: missing {missing}, unexpected {extra}")
    psi = params["psi"]
    if isinstance(psi, str):
        psi = PsiSpec.from_name(psi)
    if not isinstance(psi, PsiSpec):
        raise ParameterError(f"psi must be a PsiSpec or a name, got {psi!r}")
    alpha = float(params["alpha"])
    FracOrder.for_solver(alpha)
    a = float(params["a"])
    if psi.kind is PsiKind.LOGARITHM and not a > 0.0:
        raise DomainError(f"logarithmic psi needs a > 0, got a={a}")
    psi(a)  # domain check
    values = {k: float(params[k]) for k in required - {"psi", "alpha", "a"}}
    for name in ("nu", "rho0"):
        if name in values and not values[name] > 0.0:
            raise ParameterError(f"{name} must be positive, got {values[name]}")
    return ProblemSpec(app, alpha, psi, a, **values)


def initial_guess(problem: ProblemSpec) -> TermSum | tuple[TermSum, TermSum]:
    if problem.app is App.TUBE_PRESSURE:
        return TermSum.of(Cylindrical({0: 1.0, 2: -1.0}))
    if problem.app is App.TUBE:
        return TermSum.of(Cylindrical.monomial(1, 1.0))
    return TermSum.of(Planar.sin(1, -1.0)), TermSum.of(Planar.sin(1, 1.0))


def initial_condition(problem: ProblemSpec, point):
    """Prescribed data at ``t = a``."""
    if problem.app is App.TUBE_PRESSURE:
        r = _radius(point)
        return 1.0 - r * r
    if problem.app is App.TUBE:
        return _radius(point)
    x, y = point
    s = math.sin(x + y)
    return -s, s


def odd_double_factorial(n: int) -> int:
    """``n!!`` for odd ``n >= -1`` with ``(-1)!! = 1``."""
    if n < -1 or n % 2 == 0:
        raise DomainError(f"odd double factorial needs odd n >= -1, got {n}")
    out = 1
    for k in range(3, n + 1, 2):
        out *= k
    return out


def tube_coefficient(k: int) -> int:
    """``[(2k - 3)!!]^2``: order-``k`` coefficient of the tube solution."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return odd_double_factorial(2 * k - 3) ** 2


def _radius(point) -> float:
    return float(point[0] if isinstance(point, (tuple, list)) else point)


def exact_solution(problem: ProblemSpec, point, t: float, K: int = 4):
    """Closed-form solution at ``(point, t)``.

    The tube solution is an asymptotic series; ``K`` sets how many time powers
    are kept.  The planar problem returns the pair ``(u, v)``.
    """
    if t < problem.a:
        raise DomainError(f"t={t} precedes a={problem.a}")
    x = problem.psi.increment(problem.a, t)
    alpha = problem.alpha
    if problem.app is App.TUBE_PRESSURE:
        r = _radius(point)
        return 1.0 - r * r + (problem.P - 4.0 * problem.nu) * x**alpha / gamma_eval(alpha + 1.0)
    if problem.app is App.TUBE:
        if K < 1:
            raise DomainError(f"K must be >= 1, got {K}")
        r = _radius(point)
        if r == 0.0:
            raise SingularPointError("tube solution is singular on the axis r = 0")
        terms = [r]
        for k in range(1, K + 1):
            terms.append(
                tube_coefficient(k) * problem.nu**k * r ** (1 - 2 * k) * x ** (k * alpha)
                / gamma_eval(k * alpha + 1.0)
            )
        return math.fsum(terms)
    xx, yy = point
    envelope = mittag_leffler(alpha, -2.0 * problem.rho0 * x**alpha)
    drift = problem.g * x**alpha / gamma_eval(alpha + 1.0)
    s = math.sin(xx + yy)
    return -s * envelope + drift, s * envelope - drift
