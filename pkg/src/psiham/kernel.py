"""psi-fractional integral and psi-Caputo derivative.

Closed forms on the power basis plus quadrature for general integrands.  The
quadrature maps ``tau -> s = psi(tau)``, which turns the kernel into
``(psi(t) - s)^(alpha - 1)`` on a uniform ``s``-grid, and integrates that
kernel exactly against interpolated data (product integration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import DomainError, NonFiniteError, StepError
from .psi import PsiSpec
from .special import gamma_eval

__all__ = [
    "FracOrder",
    "frac_integral_power",
    "frac_integral_numeric",
    "caputo_derivative_numeric",
    "frac_integral_curve",
    "caputo_derivative_curve",
    "default_step",
]


@dataclass(frozen=True)
class FracOrder:
    """Order ``alpha > 0`` with its integer ceiling ``n``."""

    alpha: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError(f"fractional order must be positive, got {self.alpha}")

    @property
    def n(self) -> int:
        a = self.alpha
        return int(a) if a == int(a) else int(math.floor(a)) + 1

    @classmethod
    def for_solver(cls, alpha: float) -> "FracOrder":
        if not (0.0 < alpha <= 1.0):
            raise DomainError(f"solver order must lie in (0, 1], got {alpha}")
        return cls(alpha)

    def __float__(self) -> float:
        return float(self.alpha)


def default_step(a: float, t: float) -> float:
    return 1e-4 * max(1.0, t - a)


def _call(f: Callable, tau: float) -> float:
    try:
        with np.errstate(all="ignore"):
            return float(f(tau))
    except (ZeroDivisionError, OverflowError, ValueError):
        return math.nan


def _sample(f: Callable, taus: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on ``taus``, vectorised when ``f`` accepts arrays."""
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(f(taus), dtype=float)
        if vals.shape != taus.shape:
            raise ValueError
    except Exception:
        vals = np.array([_call(f, tau) for tau in taus])
    if not np.all(np.isfinite(vals)):
        bad = taus[~np.isfinite(vals)][0]
        raise NonFiniteError(f"integrand is not finite at tau={bad}")
    return vals


def _check_interval(psi: PsiSpec, a: float, t: float) -> float:
    if not t > a:
        raise DomainError(f"need t > a, got a={a}, t={t}")
    return psi.increment(a, t)


def frac_integral_power(alpha, delta: float, psi: PsiSpec, a: float, t: float) -> float:
    """Exact ``I^{alpha,psi}`` of ``(psi(t) - psi(a))^(delta - 1)``."""
    alpha = float(alpha)
    if not delta > 0.0:
        raise DomainError(f"power-rule exponent delta must be positive, got {delta}")
    if not alpha > 0.0:
        raise DomainError(f"order must be positive, got {alpha}")
    x = psi.increment(a, t)
    expo = alpha + delta - 1.0
    if x == 0.0:
        if expo > 0.0:
            return 0.0
        if expo == 0.0:
            return gamma_eval(delta) / gamma_eval(alpha + delta)
        raise DomainError("power-rule value is unbounded at t = a")
    return gamma_eval(delta) / gamma_eval(alpha + delta) * x**expo


def frac_integral_numeric(
    alpha, f: Callable, psi: PsiSpec, a: float, t: float, nodes: int = 256
) -> float:
    """``I^{alpha,psi} f(t)`` by product integration on ``nodes`` points.

    ``f`` is interpolated linearly in ``s = psi(tau)``.  ``alpha = 0`` returns
    ``f(t)`` unchanged.
    """
    alpha = float(alpha)
    if alpha == 0.0:
        return float(f(t))
    FracOrder(alpha)
    if nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {nodes}")
    x = _check_interval(psi, a, t)
    if not math.isfinite(_call(f, a)):
        return _singular_lower(alpha, f, psi, a, t, x, nodes) / gamma_eval(alpha)
    cells = nodes - 1
    vals = _sample(f, psi.grid(a, t, cells))
    return kernels.linear_product_integral(vals, alpha, x / cells) / gamma_eval(alpha)


def _singular_lower(alpha: float, f: Callable, psi: PsiSpec, a: float, t: float,
                    x: float, nodes: int) -> float:
    # Integrable blow-up of f at tau = a.  Upper half: product integration as
    # usual.  Lower half: s = (x/2) u^2 turns s^(-1/2)-type data into smooth
    # integrands, and Gauss-Legendre never samples u = 0.
    cells = max(nodes // 2, 1)
    taus = psi.offset(a, x / 2.0 + (x / 2.0) * np.arange(cells + 1) / cells)
    taus[-1] = t
    upper = kernels.linear_product_integral(_sample(f, taus), alpha, x / 2.0 / cells)
    u, w = np.polynomial.legendre.leggauss(max(nodes - cells, 2))
    u = 0.5 * (u + 1.0)
    s = 0.5 * x * u**2
    vals = _sample(f, psi.offset(a, s))
    lower = float(np.sum(0.5 * w * vals * (x - s) ** (alpha - 1.0) * x * u))
    return upper + lower


def _cells_for(a: float, t: float, grid_step: float | None, nodes: int | None) -> int:
    if nodes is not None:
        if nodes < 3:
            raise StepError(f"need at least 3 nodes, got {nodes}")
        return nodes - 1
    h = default_step(a, t) if grid_step is None else float(grid_step)
    if not h > 0.0:
        raise StepError(f"grid step must be positive, got {h}")
    if h >= (t - a) / 2.0:
        raise StepError(f"grid step {h} too coarse for the interval [{a}, {t}]")
    return int(math.ceil((t - a) / h - 1e-9))


def _classical_derivative(f: Callable, psi: PsiSpec, a: float, t: float, h: float) -> float:
    if t - h >= a:
        d = (float(f(t + h)) - float(f(t - h))) / (2.0 * h)
    else:
        d = (-3.0 * float(f(t)) + 4.0 * float(f(t + h)) - float(f(t + 2.0 * h))) / (2.0 * h)
    if not math.isfinite(d):
        raise NonFiniteError(f"derivative is not finite at t={t}")
    return d / psi.prime(t)


def caputo_derivative_numeric(
    alpha,
    f: Callable,
    psi: PsiSpec,
    a: float,
    t: float,
    grid_step: float | None = None,
    *,
    nodes: int | None = None,
) -> float:
    """``D^{alpha,psi} f(t)`` for ``0 < alpha <= 1``.

    For ``alpha < 1`` the psi-derivative ``f'/psi'`` is taken by central
    differences at the cell midpoints of a uniform ``s``-grid, which on that
    grid is the divided difference of neighbouring samples, and the resulting
    piecewise-constant data are integrated exactly against
    ``(psi(t) - s)^(-alpha) / Gamma(1 - alpha)`` (the L1 scheme).  Sampling
    never touches a derivative at ``tau = a``, where power-type data are
    singular.  ``alpha = 1`` uses a plain finite difference.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"derivative order must lie in (0, 1], got {alpha}")
    x = _check_interval(psi, a, t)
    if alpha == 1.0:
        h = default_step(a, t) if grid_step is None else float(grid_step)
        if not 0.0 < h < (t - a) / 2.0:
            raise StepError(f"grid step {h} invalid for the interval [{a}, {t}]")
        return _classical_derivative(f, psi, a, t, h)
    cells = _cells_for(a, t, grid_step, nodes)
    vals = _sample(f, psi.grid(a, t, cells))
    gamma = 1.0 - alpha
    return kernels.constant_product_integral(vals, gamma, x / cells) / gamma_eval(gamma)


def frac_integral_curve(
    alpha, f: Callable, psi: PsiSpec, a: float, t_end: float, nodes: int = 256
) -> tuple[np.ndarray, np.ndarray]:
    """``I^{alpha,psi} f`` at every node of the uniform ``s``-grid on ``[a, t_end]``."""
    alpha = float(alpha)
    FracOrder(alpha)
    x = _check_interval(psi, a, t_end)
    cells = nodes - 1
    taus = psi.grid(a, t_end, cells)
    vals = _sample(f, taus)
    out = kernels.linear_product_history(vals, alpha, x / cells) / gamma_eval(alpha)
    return taus, out


def caputo_derivative_curve(
    alpha, f: Callable, psi: PsiSpec, a: float, t_end: float, nodes: int = 256
) -> tuple[np.ndarray, np.ndarray]:
    """L1 values of ``D^{alpha,psi} f`` at every node of the ``s``-grid; 0 at ``a``."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"curve derivative needs 0 < alpha < 1, got {alpha}")
    x = _check_interval(psi, a, t_end)
    cells = nodes - 1
    taus = psi.grid(a, t_end, cells)
    vals = _sample(f, taus)
    gamma = 1.0 - alpha
    out = kernels.constant_product_history(vals, gamma, x / cells) / gamma_eval(gamma)
    return taus, out
