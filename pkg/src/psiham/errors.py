"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class PsiHamError(Exception):
    """Base class for all errors raised by :mod:`psiham`."""


class DomainError(PsiHamError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NonFiniteError(PsiHamError, ArithmeticError):
    pass


class StepError(PsiHamError, ValueError):
    pass


class PoleError(PsiHamError, ValueError):
    pass


class ConvergenceError(PsiHamError, ArithmeticError):
    pass


class VariantError(PsiHamError, TypeError):
    """Cylindrical and planar expressions were mixed."""


class LengthError(PsiHamError, ValueError):
    pass


class SingularPointError(PsiHamError, ZeroDivisionError):
    """Evaluation at r = 0 of an expression with negative powers of r."""


class OrderError(PsiHamError, ValueError):
    pass


class ConvergenceRegionError(PsiHamError, ValueError):
    """Geometric resummation requested with ``|1 + hbar| >= 1``."""


class ParameterError(PsiHamError, ValueError):
    pass


class MismatchError(PsiHamError, AssertionError):
    """Engine output disagrees with a reference table of iterates."""

    def __init__(self, message: str, offenders: list | None = None):
        super().__init__(message)
        self.offenders = offenders or []
