from __future__ import annotations

import json
import math
from fractions import Fraction

import pytest

from psiham import (
    Cylindrical,
    DomainError,
    HamSeries,
    LengthError,
    Planar,
    PsiSpec,
    SingularPointError,
    TemporalPower,
    TermSum,
    VariantError,
    gamma_eval,
    series_eval,
)
from psiham.terms import (
    cylindrical_operator,
    planar_convection,
    planar_derivative,
    planar_laplacian,
    temporal_value,
)


def test_cylindrical_operator_on_monomials():
    e = Cylindrical({2: 3.0, 1: 1.0, -1: 2.0, 0: 5.0})
    assert cylindrical_operator(e) == Cylindrical({0: 12.0, -1: 1.0, -3: 2.0})


def test_cylindrical_operator_keeps_fractions_exact():
    e = Cylindrical({-3: Fraction(1, 3)})
    assert cylindrical_operator(e).coefficients() == {-5: Fraction(3)}


def test_cylindrical_axis_is_singular_only_for_negative_powers():
    assert Cylindrical({0: 1.0, 2: -1.0}).evaluate(0.0) == 1.0
    with pytest.raises(SingularPointError):
        Cylindrical({-1: 1.0}).evaluate(0.0)


def test_planar_laplacian_and_derivative():
    e = Planar.from_modes(2.0, {1: (1.0, 0.5), 3: (0.0, -1.0)})
    assert planar_laplacian(e) == Planar.from_modes(0.0, {1: (-2.0, -1.0), 3: (0.0, 18.0)})
    assert planar_derivative(Planar.sin(2, 1.5)) == Planar.cos(2, 3.0)


def test_planar_product_to_sum():
    prod = Planar.sin(1).product(Planar.cos(1))
    assert prod == Planar.sin(2, 0.5)
    square = Planar.sin(1).product(Planar.sin(1))
    assert square == Planar({("cos", 0): 0.5, ("cos", 2): -0.5})
    x, y = 0.3, 1.1
    assert square.evaluate(x, y) == pytest.approx(math.sin(x + y) ** 2, abs=1e-15)


def test_variants_never_mix():
    with pytest.raises(VariantError):
        Cylindrical.constant(1.0) + Planar.constant(1.0)
    with pytest.raises(VariantError):
        planar_laplacian(Cylindrical.constant(1.0))
    with pytest.raises(VariantError):
        TermSum.of(Cylindrical.constant(1.0)) + TermSum.of(Planar.constant(1.0))


def test_convection_length_checks():
    u = [TermSum.of(Planar.sin(1))]
    with pytest.raises(LengthError):
        planar_convection(u, [], u, 1)


def test_temporal_power_normalisation():
    tp = TemporalPower(2, 1)
    assert tp.beta(0.5) == 2.0 and tp.shifted() == TemporalPower(3, 1)
    assert temporal_value(tp, 0.5, 2.0) == pytest.approx(2.0**2 / 2.0)
    assert temporal_value(TemporalPower(), 0.5, 0.0) == 1.0
    assert temporal_value(TemporalPower(1), 0.5, 0.0) == 0.0
    with pytest.raises(DomainError):
        TemporalPower(-1)


def test_integration_is_index_shift():
    s = TermSum.of(Cylindrical.monomial(-1, 2.0), TemporalPower(1))
    assert s.integrate(0.4) == TermSum.of(Cylindrical.monomial(-1, 2.0), TemporalPower(2))


def test_terminal_value_keeps_only_constant_powers():
    s = TermSum.of(Cylindrical.constant(1.0)) + TermSum.of(Cylindrical.constant(3.0), TemporalPower(1))
    assert s.at_terminal() == TermSum.of(Cylindrical.constant(1.0))


def test_product_renormalises_temporal_powers():
    alpha, x = 0.6, 0.8
    p = TermSum.of(Planar.sin(1), TemporalPower(1))
    q = TermSum.of(Planar.cos(1), TemporalPower(2))
    prod = p.product(q, alpha)
    point = (0.2, 0.5)
    assert prod.evaluate(alpha, x, point) == pytest.approx(
        p.evaluate(alpha, x, point) * q.evaluate(alpha, x, point), rel=1e-14)


def test_records_round_trip():
    s = (TermSum.of(Planar.from_modes(1.0, {1: (2.0, -1.0), 2: (0.5, 0.0)}), TemporalPower(1))
         + TermSum.of(Planar.sin(1, -1.0)))
    rows = json.loads(json.dumps(s.to_records()))
    assert TermSum.from_records("planar", rows) == s
    with pytest.raises(VariantError):
        TermSum.from_records("cylindrical", rows)


def test_series_json_and_evaluation():
    u = [TermSum.of(Cylindrical.monomial(1)), TermSum.of(Cylindrical.monomial(-1, 0.7), TemporalPower(1))]
    series = HamSeries(0.5, "cylindrical", u)
    back = HamSeries.from_json(json.loads(json.dumps(series.to_json())))
    psi = PsiSpec.logarithm()
    t, r = 2.0, 0.4
    want = r + 0.7 / r * math.log(2.0) ** 0.5 / gamma_eval(1.5)
    assert series_eval(back, psi, 1.0, (r,), t) == series_eval(series, psi, 1.0, (r,), t)
    assert series_eval(series, psi, 1.0, (r,), t) == pytest.approx(want, rel=1e-15)
    assert series_eval(series, psi, 1.0, (r,), t, orders_used=0) == r
    with pytest.raises(LengthError):
        series.partial_sum(5)
    with pytest.raises(DomainError):
        HamSeries.from_json({"format": "other"})
