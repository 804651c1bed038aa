"""Independent reference computations used by the tests.

Nothing here imports the engine: fractional integrals come from mpmath
quadrature, the tube recursion from sympy differentiation, Mittag-Leffler
values from closed-form identities.
"""

from __future__ import annotations

import math

import mpmath
import sympy as sp


def psi_integral_mp(alpha: float, f, psi: str, a: float, t: float, dps: int = 30) -> float:
    """``I^{alpha,psi} f(t)`` by tanh-sinh quadrature in the variable ``s = psi(tau)``."""
    with mpmath.workdps(dps):
        if psi == "identity":
            inv = lambda s: s  # noqa: E731
            sa, st = mpmath.mpf(a), mpmath.mpf(t)
        else:
            inv = mpmath.exp
            sa, st = mpmath.log(a), mpmath.log(t)
        alpha = mpmath.mpf(alpha)
        val = mpmath.quad(lambda s: (st - s) ** (alpha - 1) * f(inv(s)), [sa, st])
        return float(val / mpmath.gamma(alpha))


def power_rule_mp(alpha: float, delta: float, x: float) -> float:
    with mpmath.workdps(30):
        return float(mpmath.gamma(delta) / mpmath.gamma(alpha + delta) * mpmath.mpf(x) ** (alpha + delta - 1))


def ml_half_negative(x: float) -> float:
    """``E_{1/2}(-x) = exp(x^2) erfc(x)`` for ``x >= 0``."""
    with mpmath.workdps(40):
        return float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))


def ml_mp(alpha: float, z: float) -> float:
    """Direct series with enough working digits to absorb the cancellation."""
    peak = max((m * math.log10(abs(z)) - math.lgamma(m * alpha + 1) / math.log(10) for m in range(1, 4000)),
               default=0.0) if z else 0.0
    with mpmath.workdps(40 + int(max(peak, 0))):
        z = mpmath.mpf(z)
        total, m, prev = mpmath.mpf(0), 0, mpmath.inf
        while True:
            term = z**m / mpmath.gamma(m * mpmath.mpf(alpha) + 1)
            total += term
            if abs(term) < prev and abs(term) < mpmath.mpf(10) ** -35 * max(1, abs(total)):
                return float(total)
            prev = abs(term)
            m += 1


def tube_adm_coefficients(K: int, nu=sp.Integer(1)) -> list:
    """Coefficients ``c_k`` of ``r^(1 - 2k) X^(k alpha) / Gamma(k alpha + 1)`` in the
    tube solution, from the plain decomposition recursion
    ``u_k = I^alpha[nu (u_{k-1})_rr + nu (u_{k-1})_r / r]`` with ``u_0 = r``.

    Time enters only through the normalised power, which ``I^alpha`` shifts by
    one; the spatial operator is applied with sympy differentiation.
    """
    r = sp.symbols("r", positive=True)
    u = r
    out = []
    for k in range(1, K + 1):
        u = sp.expand(nu * (sp.diff(u, r, 2) + sp.diff(u, r) / r))
        coeff = sp.simplify(u * r ** (2 * k - 1))
        out.append(coeff)
    return out


def tube_law(k: int) -> int:
    """``[1 * 3 * ... * (2k - 3)]^2``."""
    return math.prod(range(1, 2 * k - 2, 2)) ** 2
