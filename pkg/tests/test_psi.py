from __future__ import annotations

import math

import numpy as np
import pytest

from psiham import DomainError, PsiKind, PsiSpec, psi_eval


def test_identity_and_log_values():
    ident, log = PsiSpec.identity(), PsiSpec.logarithm()
    assert psi_eval(ident, 2.5) == (2.5, 1.0)
    assert psi_eval(log, math.e) == pytest.approx((1.0, 1.0 / math.e))


def test_log_rejects_non_positive_time():
    with pytest.raises(DomainError):
        PsiSpec.logarithm()(0.0)
    with pytest.raises(DomainError):
        PsiSpec.logarithm().prime(-1.0)


def test_increment_is_cancellation_free_for_log():
    log = PsiSpec.logarithm()
    a = 1e8
    assert log.increment(a, a * (1 + 1e-12)) == pytest.approx(1e-12, rel=1e-3)


def test_increment_refuses_reversed_interval():
    with pytest.raises(DomainError):
        PsiSpec.identity().increment(2.0, 1.0)


def test_grid_is_uniform_in_psi_with_exact_endpoints():
    log = PsiSpec.logarithm()
    taus = log.grid(1.0, 5.0, 64)
    assert taus[0] == 1.0 and taus[-1] == 5.0
    steps = np.diff(np.log(taus))
    assert np.allclose(steps, math.log(5.0) / 64, rtol=1e-12)


def test_custom_psi_validation():
    sq = PsiSpec.custom(lambda t: t * t, lambda t: 2 * t, math.sqrt, 0.5, 3.0, name="square")
    assert sq.kind is PsiKind.CUSTOM
    assert sq.increment(1.0, 2.0) == 3.0
    with pytest.raises(DomainError):
        PsiSpec.custom(lambda t: -t, lambda t: -1.0, lambda s: -s, 0.0, 1.0)
    with pytest.raises(DomainError):
        PsiSpec.custom(lambda t: t, lambda t: 1.0, lambda s: 2 * s, 0.0, 1.0)


def test_custom_psi_needs_all_maps():
    with pytest.raises(DomainError):
        PsiSpec(PsiKind.CUSTOM, 0.0, 1.0, value=lambda t: t)


def test_from_name_and_serialisation():
    assert PsiSpec.from_name("log") == PsiSpec.logarithm()
    assert PsiSpec.from_name("identity").to_dict() == {"kind": "identity"}
    with pytest.raises(DomainError):
        PsiSpec.from_name("sqrt")
