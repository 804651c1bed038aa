"""Gamma and one-parameter Mittag-Leffler functions."""

from __future__ import annotations

import functools
import math
import sys
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "MlQuery",
    "MlResult",
    "gamma_eval",
    "rgamma",
    "ml_eval",
    "ml_series",
    "mittag_leffler",
    "ML_Z_CAP",
]

ML_Z_CAP = 30.0
_EPS = sys.float_info.epsilon


def gamma_eval(x: float) -> float:
    """Gamma function on the reals, raising :class:`PoleError` at 0, -1, -2, ...

    Backed by the C library ``tgamma`` (via :func:`math.gamma`), whose relative
    error is a few ulps on (0, 50].
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at x={x:g}")
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise DomainError(f"Gamma({x}) overflows double precision") from exc


def rgamma(x: float) -> float:
    """Reciprocal Gamma, zero at the poles and for large arguments."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


@dataclass(frozen=True)
class MlQuery:
    alpha: float
    z: float
    tol: float = 1e-15
    max_terms: int = 1000

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise DomainError(f"Mittag-Leffler order must be positive, got {self.alpha}")
        if not (0.0 < self.tol <= 1e-3):
            raise DomainError(f"tol must lie in (0, 1e-3], got {self.tol}")
        if not (1 <= self.max_terms <= 1000):
            raise DomainError(f"max_terms must lie in [1, 1000], got {self.max_terms}")
        if not abs(self.z) <= ML_Z_CAP:
            raise DomainError(f"|z| = {abs(self.z)} exceeds the series cap {ML_Z_CAP}")


@dataclass(frozen=True)
class MlResult:
    value: float
    terms: int
    error_estimate: float


def _ml_log_term(alpha: float, z: float, m: int) -> float:
    """Natural log of ``|z^m / Gamma(m alpha + 1)|`` for ``z != 0``."""
    return m * math.log(abs(z)) - math.lgamma(m * alpha + 1.0)


def _ml_term(alpha: float, z: float, m: int) -> float:
    if m == 0:
        return 1.0
    if z == 0.0:
        return 0.0
    mag = math.exp(_ml_log_term(alpha, z, m))
    return -mag if (z < 0.0 and m % 2) else mag


def _peak_log10(q: MlQuery) -> float:
    """log10 of the largest series term."""
    if q.z == 0.0:
        return 0.0
    best = 0.0
    for m in range(1, q.max_terms + 2):
        v = _ml_log_term(q.alpha, q.z, m)
        best = max(best, v)
        if v < best - 50.0:
            break
    return best / math.log(10.0)


def _stop(mag: float, prev_mag: float, partial: float, tol: float) -> bool:
    return mag <= prev_mag and mag <= tol * max(abs(partial), 1.0)


def _series_double(q: MlQuery) -> tuple[float, int, float, float]:
    """Double-precision sum: ``(value, terms used, tail bound, largest term)``."""
    alpha, z = float(q.alpha), float(q.z)
    terms = [1.0]
    partial = 1.0
    biggest = 1.0
    prev_mag = 1.0
    for m in range(1, q.max_terms + 1):
        t = _ml_term(alpha, z, m)
        mag = abs(t)
        if not math.isfinite(t) or not math.isfinite(partial + t):
            raise ConvergenceError(f"E_{alpha}({z}) overflows double precision")
        terms.append(t)
        if _stop(mag, prev_mag, partial, q.tol):
            # the stopping term is kept; the tail starts at the next one
            nxt = abs(_ml_term(alpha, z, m + 1))
            ratio = nxt / mag if mag > 0.0 else 0.0
            tail = nxt / (1.0 - ratio) if ratio < 1.0 else math.inf
            return math.fsum(terms), m + 1, tail, biggest
        partial += t
        biggest = max(biggest, mag)
        prev_mag = mag
    raise ConvergenceError(f"E_{alpha}({z}) not converged after {q.max_terms} terms")


@functools.lru_cache(maxsize=8192)
def _rgamma_mp(alpha: float, m: int, digits: int):
    # depends on the order only, so repeated arguments of one alpha share it
    with mpmath.workdps(digits):
        return mpmath.rgamma(m * mpmath.mpf(alpha) + 1)


def _series_extended(q: MlQuery, digits: int) -> tuple[float, int, float]:
    """Same series and stopping rule, summed with ``digits`` significant digits."""
    with mpmath.workdps(digits):
        z = mpmath.mpf(q.z)
        partial = mpmath.mpf(1)
        prev_mag = mpmath.mpf(1)
        power = mpmath.mpf(1)
        for m in range(1, q.max_terms + 1):
            power *= z
            t = power * _rgamma_mp(float(q.alpha), m, digits)
            mag = abs(t)
            if mag <= prev_mag and mag <= q.tol * max(abs(partial), 1):
                partial += t
                nxt = abs(power * z * _rgamma_mp(float(q.alpha), m + 1, digits))
                ratio = nxt / mag if mag > 0 else 0
                tail = float(nxt / (1 - ratio)) if ratio < 1 else math.inf
                return float(partial), m + 1, tail
            partial += t
            prev_mag = mag
    raise ConvergenceError(f"E_{q.alpha}({q.z}) not converged after {q.max_terms} terms")


def ml_series(q: MlQuery) -> MlResult:
    """Sum ``E_alpha(z) = sum_{m>=0} z^m / Gamma(m alpha + 1)`` to tolerance.

    The sum stops after the first term whose magnitude drops below
    ``tol * max(|partial sum|, 1)`` once the terms are decreasing; that term
    is included.  The error estimate bounds the geometric tail (term ratios
    decrease in ``m`` by log-convexity of Gamma) plus the rounding loss of the
    largest term.

    For negative ``z`` and small ``alpha`` the terms grow far beyond the sum
    and cancel; when that rounding loss would exceed the tolerance the same
    series is re-summed with enough extra digits to absorb it.
    """
    peak = _peak_log10(q)
    if peak < 300.0:
        value, used, tail, biggest = _series_double(q)
        rounding = 4.0 * _EPS * biggest * used
        if rounding <= q.tol * max(abs(value), 1.0):
            return MlResult(value, used, tail + rounding)
    # rounded up so that nearby arguments share cached Gamma values
    digits = 20 + 10 * int(math.ceil(peak / 10.0))
    value, used, tail = _series_extended(q, digits)
    return MlResult(value, used, tail + 4.0 * _EPS * abs(value))


def ml_eval(q: MlQuery) -> float:
    """Value of the one-parameter Mittag-Leffler function for ``q``."""
    return ml_series(q).value


def mittag_leffler(alpha: float, z, tol: float = 1e-15, max_terms: int = 1000):
    """Vectorised :func:`ml_eval` over an array of real arguments.

    Scalars in, scalar out.  Applies the same |z| cap and tolerance rule as
    :func:`ml_series`, using the largest |z| to decide when to stop.
    """
    zs = np.asarray(z, dtype=float)
    if zs.size == 0:
        return zs.copy()
    MlQuery(alpha, float(np.max(np.abs(zs))), tol, max_terms)  # validation only
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs)
    mask = zs != 0.0
    logz = np.zeros_like(zs)
    logz[mask] = np.log(np.abs(zs[mask]))
    neg = zs < 0.0
    total = np.ones_like(zs)
    comp = np.zeros_like(zs)
    prev = np.ones_like(zs)
    biggest = np.ones_like(zs)
    m = 1
    while True:
        if m > max_terms:
            raise ConvergenceError(f"E_{alpha} not converged after {max_terms} terms")
        with np.errstate(over="ignore", invalid="ignore"):
            mag = np.where(mask, np.exp(m * logz - math.lgamma(m * alpha + 1.0)), 0.0)
        term = np.where(neg & (m % 2 == 1), -mag, mag)
        done = (mag <= prev) & (mag <= tol * np.maximum(np.abs(total), 1.0))
        # Kahan summation keeps the cancellation error at the level of the largest term
        with np.errstate(invalid="ignore", over="ignore"):
            y = term - comp
            s = total + y
            comp = (s - total) - y
        total = s
        biggest = np.maximum(biggest, mag)
        if np.all(done):
            break
        prev = mag
        m += 1
    with np.errstate(invalid="ignore", over="ignore"):
        lossy = ~np.isfinite(total) | (4.0 * _EPS * biggest * m > tol * np.maximum(np.abs(total), 1.0))
    for i in np.flatnonzero(lossy):
        total[i] = ml_series(MlQuery(alpha, float(zs[i]), tol, max_terms)).value
    return float(total[0]) if scalar else total
