from __future__ import annotations

import json
import math

import pytest

from psiham import (
    DomainError,
    GridSpec,
    MismatchError,
    QuadParams,
    SeparableCandidate,
    ham_series,
    HamConfig,
    MlQuery,
    ml_eval,
    initial_condition_check,
    make_problem,
    residual_norm,
    resum_geometric,
    series_oracle_compare,
)
from psiham.verify import load_tolerances, reference_iterates

TUBE_P = make_problem("tube-pressure", alpha=0.5, psi="log", a=1.0, nu=1.0, P=1.0)
TUBE = make_problem("tube", alpha=0.5, psi="log", a=1.0, nu=1.0)
PLANAR = make_problem("planar", alpha=0.5, psi="log", a=1.0, rho0=1.0, g=0.0)


def test_grid_invariants():
    with pytest.raises(DomainError):
        GridSpec.cylindrical(1.0, r=(0.0, 1.0))
    with pytest.raises(DomainError):
        GridSpec.cylindrical(1.0, eps=0.0)
    with pytest.raises(DomainError):
        GridSpec.cylindrical(1.0, t_end=1.01, eps=0.05)
    g = GridSpec.planar(0.0, n_x=3, n_y=2, n_t=4)
    assert len(g.points()) == 6 and len(g.times()) == 4 and g.times()[0] == 0.05


def test_packaged_tolerances_and_override(tmp_path, monkeypatch):
    tol = load_tolerances()
    assert tol["residual"]["tube-pressure"]["nodes"] == 2048
    custom = dict(tol, oracle_coefficient=1e-9)
    path = tmp_path / "tol.json"
    path.write_text(json.dumps(custom))
    monkeypatch.setenv("PSI_HAM_TOLERANCES", str(path))
    assert load_tolerances()["oracle_coefficient"] == 1e-9
    path.write_text(json.dumps({"version": 2}))
    with pytest.raises(DomainError):
        load_tolerances()


def test_forced_tube_residual_and_order():
    grid = GridSpec.cylindrical(1.0)
    coarse = residual_norm(TUBE_P, SeparableCandidate.from_exact(TUBE_P), grid, QuadParams(nodes=2048))
    fine = residual_norm(TUBE_P, SeparableCandidate.from_exact(TUBE_P), grid, QuadParams(nodes=4096))
    assert coarse.sup <= 5e-3 and coarse.ic_ok and not coarse.failures
    order = math.log2(coarse.sup / fine.sup)
    assert order >= 0.8 * (2 - TUBE_P.alpha)


def test_residual_report_is_reproducible_and_serialisable():
    grid = GridSpec.cylindrical(1.0, n_r=4, n_t=3)
    a = residual_norm(TUBE_P, SeparableCandidate.from_exact(TUBE_P), grid, QuadParams(nodes=256), budget=1.0)
    b = residual_norm(TUBE_P, SeparableCandidate.from_exact(TUBE_P), grid, QuadParams(nodes=256), budget=1.0)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    assert a.within_budget and "PASS" in a.to_text()
    assert a.equations[0].sup >= a.equations[0].rms >= 0.0


def test_classical_planar_residual():
    p = make_problem("planar", alpha=1.0, psi="identity", a=0.0, rho0=1.0, g=0.0)
    report = residual_norm(p, SeparableCandidate.from_exact(p), GridSpec.planar(0.0))
    assert report.sup <= 1e-6


def test_planar_with_pressure_gradient_residual():
    p = make_problem("planar", alpha=0.6, psi="identity", a=0.0, rho0=1.0, g=0.7)
    report = residual_norm(p, SeparableCandidate.from_exact(p), GridSpec.planar(0.0, n_x=6, n_y=6, n_t=4))
    assert report.sup <= 5e-3


def test_zero_candidate_flags_initial_condition_only():
    report = residual_norm(TUBE, lambda pt, t: 0.0, GridSpec.cylindrical(1.0, n_r=4, n_t=3), QuadParams(nodes=128))
    assert report.sup == 0.0
    assert not report.ic_ok and report.ic_max_error == pytest.approx(1.0)


def test_black_box_candidate_matches_term_residual():
    grid = GridSpec.planar(1.0, n_x=4, n_y=3, n_t=3)
    quad = QuadParams(nodes=512)
    def field(pt, t):
        e = ml_eval(MlQuery(0.5, -2.0 * math.log(t) ** 0.5))
        s = math.sin(pt[0] + pt[1])
        return -s * e, s * e

    box = residual_norm(PLANAR, field, grid, quad)
    terms = residual_norm(PLANAR, SeparableCandidate.from_exact(PLANAR), grid, quad)
    assert abs(box.sup - terms.sup) <= 1e-5


def test_evaluation_errors_are_reported_per_point():
    def bad(pt, t):
        if pt[0] > 0.5:
            raise ZeroDivisionError("boom")
        return pt[0]

    report = residual_norm(TUBE, bad, GridSpec.cylindrical(1.0, n_r=4, n_t=2), QuadParams(nodes=64), budget=10.0)
    assert report.failures and report.failures[0].error == "ZeroDivisionError"
    assert not report.within_budget


def test_series_candidate_and_truncation_monotonicity():
    # fast-converging corner: large radius, small psi-increment
    grid = GridSpec.cylindrical(1.0, r=(5.0, 6.0), n_r=6, t_end=math.exp(0.01), n_t=6, eps=0.0005)
    sups = [residual_norm(TUBE, SeparableCandidate.from_exact(TUBE, K=K), grid).sup for K in range(2, 7)]
    for lo, hi in zip(sups, sups[1:]):
        assert hi <= lo * (1 + 1e-6) + 1e-9
    series = resum_geometric(TUBE, -0.5, terms=4)
    assert residual_norm(TUBE, series, grid).sup == pytest.approx(sups[2], rel=1e-9)


def test_initial_condition_check_for_each_problem():
    for p in (TUBE_P, TUBE, PLANAR):
        assert initial_condition_check(SeparableCandidate.from_exact(p), p).ok
        assert initial_condition_check(ham_series(p, HamConfig(-0.5, orders=3)), p).ok


def test_oracle_tables():
    assert series_oracle_compare(TUBE, 4, -0.7).max_deviation <= 1e-12
    rep = series_oracle_compare(TUBE_P, 3, -1.0)
    assert rep.zero_orders == [2, 3]
    planar = make_problem("planar", alpha=0.5, psi="log", a=1.0, rho0=1.0, g=0.4)
    assert series_oracle_compare(planar, 2, -0.5, -0.5).ok
    u1, v1 = reference_iterates(planar, -0.5)[1]
    assert (u1 + v1).is_zero()


def test_oracle_mismatch_is_reported():
    planar = make_problem("planar", alpha=0.5, psi="log", a=1.0, rho0=1.0, g=0.4)
    with pytest.raises(MismatchError) as info:
        series_oracle_compare(planar, 3, -0.5, -0.8)
    assert info.value.offenders and info.value.offenders[0]["order"] >= 2
    with pytest.raises(DomainError):
        series_oracle_compare(TUBE, 9, -0.5)
