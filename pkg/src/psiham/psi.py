"""Monotone time rescalings ``psi`` used by the fractional operators.

``Identity`` gives the classical Caputo setting, ``Logarithm`` gives the
Caputo-Hadamard one.  A ``Custom`` rescaling must ship its own derivative and
inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["PsiKind", "PsiSpec", "psi_eval"]


class PsiKind(str, Enum):
    IDENTITY = "identity"
    LOGARITHM = "log"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PsiSpec:
    """A strictly increasing C^1 map with its derivative and inverse.

    ``lower``/``upper`` bound the admissible time interval.  For the logarithm
    the lower bound is an open 0.
    """

    kind: PsiKind
    lower: float = -math.inf
    upper: float = math.inf
    value: Callable[[float], float] | None = field(default=None, compare=False)
    derivative: Callable[[float], float] | None = field(default=None, compare=False)
    inverse: Callable[[float], float] | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise DomainError(f"empty psi domain [{self.lower}, {self.upper}]")
        if self.kind is PsiKind.LOGARITHM and self.lower < 0.0:
            raise DomainError("logarithmic psi requires a positive domain")
        if self.kind is PsiKind.CUSTOM:
            if self.value is None or self.derivative is None or self.inverse is None:
                raise DomainError("custom psi needs value, derivative and inverse maps")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, lower: float = -math.inf, upper: float = math.inf) -> "PsiSpec":
        return cls(PsiKind.IDENTITY, lower, upper, name="identity")

    @classmethod
    def logarithm(cls, lower: float = 0.0, upper: float = math.inf) -> "PsiSpec":
        return cls(PsiKind.LOGARITHM, lower, upper, name="log")

    @classmethod
    def custom(
        cls,
        value: Callable[[float], float],
        derivative: Callable[[float], float],
        inverse: Callable[[float], float],
        lower: float,
        upper: float,
        name: str = "custom",
        check: bool = True,
    ) -> "PsiSpec":
        spec = cls(PsiKind.CUSTOM, lower, upper, value, derivative, inverse, name)
        if check:
            spec.validate()
        return spec

    @classmethod
    def from_name(cls, name: str) -> "PsiSpec":
        key = name.strip().lower()
        if key in ("identity", "id", "t"):
            return cls.identity()
        if key in ("log", "ln", "logarithm"):
            return cls.logarithm()
        raise DomainError(f"unknown psi {name!r}; expected 'identity' or 'log'")

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, t: float) -> None:
        if self.kind is PsiKind.LOGARITHM and not t > 0.0:
            raise DomainError(f"log psi undefined at t={t}")
        if not (self.lower <= t <= self.upper) or math.isnan(t):
            raise DomainError(f"t={t} outside psi domain [{self.lower}, {self.upper}]")

    def __call__(self, t: float) -> float:
        self._check_domain(t)
        if self.kind is PsiKind.IDENTITY:
            return float(t)
        if self.kind is PsiKind.LOGARITHM:
            return math.log(t)
        return float(self.value(t))

    def prime(self, t: float) -> float:
        self._check_domain(t)
        if self.kind is PsiKind.IDENTITY:
            return 1.0
        if self.kind is PsiKind.LOGARITHM:
            return 1.0 / t
        return float(self.derivative(t))

    def inv(self, s: float) -> float:
        if self.kind is PsiKind.IDENTITY:
            return float(s)
        if self.kind is PsiKind.LOGARITHM:
            return math.exp(s)
        return float(self.inverse(s))

    def inv_array(self, s: np.ndarray) -> np.ndarray:
        """Vectorised inverse; custom maps are applied elementwise."""
        s = np.asarray(s, dtype=float)
        if self.kind is PsiKind.IDENTITY:
            return s.copy()
        if self.kind is PsiKind.LOGARITHM:
            return np.exp(s)
        return np.array([float(self.inverse(x)) for x in s.ravel()]).reshape(s.shape)

    def grid(self, a: float, t: float, cells: int) -> np.ndarray:
        """Times whose psi-images are uniformly spaced from psi(a) to psi(t).

        Both endpoints are returned exactly.
        """
        frac = np.arange(cells + 1, dtype=float) / cells
        taus = self.offset(a, self.increment(a, t) * frac)
        taus[0], taus[-1] = a, t
        return taus

    def offset(self, a: float, steps) -> np.ndarray:
        """Times ``tau`` with ``psi(tau) - psi(a) = steps``."""
        self._check_domain(a)
        steps = np.asarray(steps, dtype=float)
        if self.kind is PsiKind.IDENTITY:
            return a + steps
        if self.kind is PsiKind.LOGARITHM:
            return a * np.exp(steps)
        return self.inv_array(float(self.value(a)) + steps)

    def increment(self, a: float, t: float) -> float:
        """``psi(t) - psi(a)``, computed without cancellation for the logarithm."""
        if t < a:
            raise DomainError(f"t={t} precedes the lower terminal a={a}")
        self._check_domain(a)
        self._check_domain(t)
        if self.kind is PsiKind.IDENTITY:
            return float(t - a)
        if self.kind is PsiKind.LOGARITHM:
            return math.log(t / a)
        return float(self.value(t)) - float(self.value(a))

    def increment_array(self, a: float, taus) -> np.ndarray:
        """Vectorised :meth:`increment` for ``taus >= a``."""
        taus = np.asarray(taus, dtype=float)
        if np.any(taus < a):
            raise DomainError(f"times precede the lower terminal a={a}")
        self._check_domain(a)
        if self.kind is PsiKind.IDENTITY:
            return taus - a
        if self.kind is PsiKind.LOGARITHM:
            return np.log(taus / a)
        va = float(self.value(a))
        return np.array([float(self.value(x)) - va for x in taus.ravel()]).reshape(taus.shape)

    def validate(self, samples: int = 257) -> None:
        """Check monotonicity, positivity of the derivative and inverse consistency."""
        lo, hi = self.lower, self.upper
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError("validation needs a finite domain")
        if self.kind is PsiKind.LOGARITHM and lo == 0.0:
            lo = min(1e-6, hi / 2)
        ts = np.linspace(lo, hi, samples)
        vals = np.array([self(t) for t in ts])
        if np.any(np.diff(vals) <= 0.0):
            raise DomainError(f"psi {self.name!r} is not strictly increasing")
        ders = np.array([self.prime(t) for t in ts])
        if np.any(~(ders > 0.0)):
            raise DomainError(f"psi {self.name!r} has a non-positive derivative")
        back = np.array([self.inv(v) for v in vals])
        err = np.abs(back - ts) / np.maximum(1.0, np.abs(ts))
        if np.max(err) > 1e-10:
            raise DomainError(f"psi {self.name!r} inverse is inconsistent (err {np.max(err):.2e})")

    def to_dict(self) -> dict:
        if self.kind is PsiKind.CUSTOM:
            raise DomainError("custom psi maps cannot be serialised")
        return {"kind": self.kind.value}


def psi_eval(psi: PsiSpec, t: float) -> tuple[float, float]:
    """Return ``(psi(t), psi'(t))``."""
    value, der = psi(t), psi.prime(t)
    if not der > 0.0:
        raise DomainError(f"psi'({t}) = {der} is not positive")
    return value, der
