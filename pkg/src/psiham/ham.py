"""Homotopy analysis recursion over the term algebra.

For ``0 < alpha <= 1`` the m-th order deformation equation integrates to::

    u_m = (chi_m + h) u_{m-1} - (chi_m + h) u_{m-1}(a) + h I^{alpha,psi}[R_m]

where ``R_m`` is the non-derivative part of the residual operator evaluated on
the earlier orders.  The forcing constants ``P`` and ``g`` enter ``R_m`` with
the gate ``1 - chi_m``, so only the first order sees them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConvergenceRegionError, DomainError, OrderError, VariantError
from .problems import App, ProblemSpec, initial_guess
from .terms import (
    Cylindrical,
    HamSeries,
    Planar,
    TermSum,
    cylindrical_operator,
    planar_laplacian,
)

__all__ = [
    "HamConfig",
    "chi",
    "ham_next_order",
    "ham_series",
    "resum_geometric",
    "check_region",
]


def chi(m: int) -> int:
    if m < 0:
        raise DomainError(f"order index must be non-negative, got {m}")
    return 0 if m <= 1 else 1


def check_region(hbar: float) -> None:
    if not abs(1.0 + hbar) < 1.0:
        raise ConvergenceRegionError(
            f"geometric resummation needs |1 + hbar| < 1, got hbar={hbar}"
        )


@dataclass(frozen=True)
class HamConfig:
    """Auxiliary parameter(s), truncation order and resummation switch.

    ``hbar2`` is the second auxiliary parameter of the coupled planar system and
    defaults to ``hbar``.  ``terms`` is the number of time powers kept by the
    resummed series.
    """

    hbar: float
    orders: int = 3
    resum: bool = False
    hbar2: float | None = None
    terms: int = 4

    def __post_init__(self) -> None:
        if self.hbar == 0.0 or self.hbar2 == 0.0:
            raise DomainError("the auxiliary parameter hbar must be non-zero")
        if self.orders < 0:
            raise DomainError(f"orders must be >= 0, got {self.orders}")
        if self.terms < 1:
            raise DomainError(f"terms must be >= 1, got {self.terms}")
        if self.resum:
            check_region(self.hbar)
            check_region(self.second)

    @property
    def second(self) -> float:
        return self.hbar if self.hbar2 is None else self.hbar2


def _step(prev: TermSum, rhs: TermSum, m: int, hbar: float, alpha: float) -> TermSum:
    c = chi(m) + hbar
    return c * prev - c * prev.at_terminal() + hbar * rhs.integrate(alpha)


def _convection(ws: list[TermSum], us: list[TermSum], vs: list[TermSum], m: int, alpha: float) -> TermSum:
    # sum_i (u_i + v_i) d/dtheta w_{m-1-i}, with temporal products re-normalised
    total = TermSum.zero("planar")
    for i in range(m):
        carrier = us[i] + vs[i]
        if carrier.is_zero():
            continue
        grad = ws[m - 1 - i].map_spatial(Planar.derivative)
        total = total + carrier.product(grad, alpha)
    return total


def ham_next_order(
    problem: ProblemSpec, previous: HamSeries, m: int, hbar: float, hbar2: float | None = None
) -> TermSum | tuple[TermSum, TermSum]:
    """Order ``m`` of the series given orders ``0 .. m-1`` in ``previous``."""
    if m < 1:
        raise OrderError(f"recursion starts at m = 1, got {m}")
    if len(previous.u) < m:
        raise OrderError(f"order {m} needs orders 0..{m - 1}, have {len(previous.u)}")
    if previous.variant != problem.variant or previous.coupled != problem.coupled:
        raise VariantError("series and problem variants disagree")
    alpha = problem.alpha
    gate = 1 - chi(m)
    if not problem.coupled:
        prev = previous.u[m - 1]
        rhs = prev.map_spatial(cylindrical_operator) * (-problem.nu)
        if problem.app is App.TUBE_PRESSURE and gate:
            rhs = rhs + TermSum.of(Cylindrical.constant(-problem.P * gate))
        return _step(prev, rhs, m, hbar, alpha)

    h1, h2 = hbar, hbar if hbar2 is None else hbar2
    us, vs = previous.u[:m], previous.v[:m]
    rhs_u = _convection(us, us, vs, m, alpha) - us[m - 1].map_spatial(planar_laplacian) * problem.rho0
    rhs_v = _convection(vs, us, vs, m, alpha) - vs[m - 1].map_spatial(planar_laplacian) * problem.rho0
    if gate and problem.g != 0.0:
        rhs_u = rhs_u + TermSum.of(Planar.constant(-problem.g))
        rhs_v = rhs_v + TermSum.of(Planar.constant(problem.g))
    return _step(us[m - 1], rhs_u, m, h1, alpha), _step(vs[m - 1], rhs_v, m, h2, alpha)


def _start(problem: ProblemSpec) -> HamSeries:
    init = initial_guess(problem)
    if problem.coupled:
        u0, v0 = init
        return HamSeries(problem.alpha, problem.variant, [u0], [v0])
    return HamSeries(problem.alpha, problem.variant, [init])


def ham_series(problem: ProblemSpec, config: HamConfig) -> HamSeries:
    """Orders ``0 .. M`` of the homotopy series, or the resummed series if asked."""
    if config.resum:
        return resum_geometric(problem, config.hbar, terms=config.terms, hbar2=config.hbar2)
    series = _start(problem)
    for m in range(1, config.orders + 1):
        nxt = ham_next_order(problem, series, m, config.hbar, config.hbar2)
        if problem.coupled:
            series.u.append(nxt[0])
            series.v.append(nxt[1])
        else:
            series.u.append(nxt)
    return series


def _linear_part(problem: ProblemSpec, s: TermSum) -> TermSum:
    """``I^alpha`` of the linear spatial operator (sign included), i.e. ``K`` in
    ``u_m = (1 + h) u_{m-1} + h K u_{m-1}`` for ``m >= 2``."""
    if problem.coupled:
        return (s.map_spatial(planar_laplacian) * (-problem.rho0)).integrate(problem.alpha)
    return (s.map_spatial(cylindrical_operator) * (-problem.nu)).integrate(problem.alpha)


def _collapse(problem: ProblemSpec, first: TermSum, hbar: float, terms: int) -> TermSum:
    # sum_{n>=0} ((1+h) + h K)^n u_1 = sum_i [sum_n C(n,i) (1+h)^(n-i)] h^i K^i u_1
    #                               = sum_i h^i / (-h)^(i+1) K^i u_1
    total = TermSum.zero(problem.variant)
    family = first
    for i in range(terms):
        total = total + family * (hbar**i / (-hbar) ** (i + 1))
        family = _linear_part(problem, family)
        if family.is_zero():
            break
    return total.truncated(terms)


def _by_power(s: TermSum, terms: int) -> list[TermSum]:
    orders = [TermSum.zero(s.variant) for _ in range(terms + 1)]
    for term in s.terms():
        orders[term.temporal.k] = orders[term.temporal.k] + TermSum(s.variant, {term.temporal: term.spatial})
    return orders


def resum_geometric(
    problem: ProblemSpec, hbar: float, terms: int = 4, hbar2: float | None = None
) -> HamSeries:
    """Sum every ``(1 + hbar)``-power family of the series in closed form.

    For ``m >= 2`` the recursion is ``u_m = Q u_{m-1}`` with
    ``Q = (1 + hbar) + hbar K``; the Neumann sum of ``Q`` applied to ``u_1``
    splits into binomial families that are geometric in ``1 + hbar``.  The
    result no longer depends on ``hbar`` and is returned with order ``k``
    holding the time power ``k``, for ``k = 0 .. terms``.

    In the planar system the convection of every order vanishes when
    ``u_i + v_i = 0``; this holds exactly for equal auxiliary parameters, and
    the resummed pair satisfies it for any admissible pair.
    """
    h2 = hbar if hbar2 is None else hbar2
    check_region(hbar)
    check_region(h2)
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    start = _start(problem)
    first = ham_next_order(problem, start, 1, hbar, h2)
    if problem.coupled:
        u = start.u[0] + _collapse(problem, first[0], hbar, terms)
        v = start.v[0] + _collapse(problem, first[1], h2, terms)
        return HamSeries(problem.alpha, problem.variant, _by_power(u, terms), _by_power(v, terms))
    u = start.u[0] + _collapse(problem, first, hbar, terms)
    return HamSeries(problem.alpha, problem.variant, _by_power(u, terms))
