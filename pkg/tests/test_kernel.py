from __future__ import annotations

import math

import numpy as np
import pytest

from psiham import (
    DomainError,
    FracOrder,
    NonFiniteError,
    PsiSpec,
    StepError,
    caputo_derivative_curve,
    caputo_derivative_numeric,
    frac_integral_curve,
    frac_integral_numeric,
    frac_integral_power,
    gamma_eval,
)

from oracles import power_rule_mp, psi_integral_mp

IDENT, LOG = PsiSpec.identity(), PsiSpec.logarithm()


def test_frac_order_ceiling():
    assert FracOrder(0.3).n == 1 and FracOrder(1.0).n == 1 and FracOrder(1.2).n == 2
    with pytest.raises(DomainError):
        FracOrder(0.0)
    with pytest.raises(DomainError):
        FracOrder.for_solver(1.5)


def test_half_integral_of_one_on_unit_interval():
    # 2 / sqrt(pi): the first value the product rule must get exactly
    assert frac_integral_numeric(0.5, lambda t: 1.0, IDENT, 0.0, 1.0) == pytest.approx(1.1283791670955126, rel=1e-14)


@pytest.mark.parametrize("psi,a,t", [(IDENT, 0.0, 2.0), (LOG, 1.0, 4.0)])
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("delta", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_power_rule_numeric_vs_closed_form(psi, a, t, alpha, delta):
    f = lambda tau: psi.increment_array(a, tau) ** (delta - 1.0)  # noqa: E731
    got = frac_integral_numeric(alpha, f, psi, a, t, nodes=1024)
    want = frac_integral_power(alpha, delta, psi, a, t)
    assert want == pytest.approx(power_rule_mp(alpha, delta, psi.increment(a, t)), rel=1e-14)
    assert abs(got - want) <= 1e-5 * max(1.0, abs(want))


def test_integral_of_smooth_function_against_mpmath():
    got = frac_integral_numeric(0.4, np.cos, LOG, 1.0, 3.0, nodes=2048)
    want = psi_integral_mp(0.4, lambda s: __import__("mpmath").cos(s), "log", 1.0, 3.0)
    assert got == pytest.approx(want, abs=1e-6)


def test_order_zero_is_identity_map():
    assert frac_integral_numeric(0.0, lambda t: t * t, IDENT, 0.0, 3.0) == 9.0


def test_order_one_is_plain_integral():
    assert frac_integral_numeric(1.0, lambda t: t, IDENT, 0.0, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_caputo_of_normalised_power():
    for psi, a, t in ((IDENT, 0.0, 1.0), (LOG, 1.0, 2.0)):
        f = lambda tau, psi=psi, a=a: psi.increment_array(a, tau) ** 0.5 / gamma_eval(1.5)  # noqa: E731
        assert caputo_derivative_numeric(0.5, f, psi, a, t) == pytest.approx(1.0, abs=1e-5)


def test_caputo_annihilates_constants():
    for alpha in (0.2, 0.6, 1.0):
        assert abs(caputo_derivative_numeric(alpha, lambda t: 7.5, LOG, 1.0, 2.0)) <= 1e-12


def test_caputo_order_one_is_psi_derivative():
    # d/dpsi of t^2 is 2t * t for psi = ln t
    assert caputo_derivative_numeric(1.0, lambda t: t * t, LOG, 1.0, 2.0) == pytest.approx(8.0, rel=1e-7)
    # near the terminal the one-sided stencil is used
    assert caputo_derivative_numeric(1.0, lambda t: t * t, IDENT, 0.0, 1e-4, grid_step=2e-5) == pytest.approx(2e-4, rel=1e-6)


def test_step_validation():
    with pytest.raises(StepError):
        caputo_derivative_numeric(0.5, np.sin, IDENT, 0.0, 1.0, grid_step=0.6)
    with pytest.raises(StepError):
        caputo_derivative_numeric(0.5, np.sin, IDENT, 0.0, 1.0, grid_step=-1.0)
    with pytest.raises(StepError):
        caputo_derivative_numeric(1.0, np.sin, IDENT, 0.0, 1.0, grid_step=0.6)


def test_non_finite_integrand_reported():
    def f(t):
        return math.inf if t > 0.5 else 1.0

    with pytest.raises(NonFiniteError):
        frac_integral_numeric(0.5, f, IDENT, 0.0, 1.0)


def test_interval_must_be_forward():
    with pytest.raises(DomainError):
        frac_integral_numeric(0.5, np.sin, IDENT, 1.0, 1.0)
    with pytest.raises(DomainError):
        frac_integral_power(0.5, 0.0, IDENT, 0.0, 1.0)


def test_curves_agree_with_pointwise_values():
    taus, vals = frac_integral_curve(0.7, np.exp, LOG, 1.0, 3.0, nodes=129)
    for i in (16, 64, 128):
        point = frac_integral_numeric(0.7, np.exp, LOG, 1.0, taus[i], nodes=i + 1)
        assert vals[i] == pytest.approx(point, rel=1e-12)
    taus, ders = caputo_derivative_curve(0.7, np.exp, LOG, 1.0, 3.0, nodes=129)
    assert ders[0] == 0.0
    assert ders[-1] == pytest.approx(caputo_derivative_numeric(0.7, np.exp, LOG, 1.0, 3.0, nodes=129), rel=1e-12)
