"""Homotopy-analysis series solutions of psi-Caputo time-fractional Navier-Stokes problems.

The fractional operators are taken with respect to a monotone time rescaling
``psi``; ``psi(t) = t`` gives the Caputo setting and ``psi(t) = ln t`` the
Caputo-Hadamard one.
"""

from __future__ import annotations

from ._backend import BACKEND
from .errors import *  # noqa: F401,F403
from .ham import HamConfig, chi, ham_next_order, ham_series, resum_geometric
from .kernel import (
    FracOrder,
    caputo_derivative_curve,
    caputo_derivative_numeric,
    frac_integral_curve,
    frac_integral_numeric,
    frac_integral_power,
)
from .problems import App, ProblemSpec, exact_solution, initial_condition, make_problem
from .psi import PsiKind, PsiSpec, psi_eval
from .special import MlQuery, MlResult, gamma_eval, ml_eval, ml_series, mittag_leffler
from .terms import (
    Cylindrical,
    HamSeries,
    Planar,
    SeriesTerm,
    TemporalPower,
    TermSum,
    series_eval,
)
from .verify import (
    GridSpec,
    QuadParams,
    SeparableCandidate,
    initial_condition_check,
    residual_norm,
    series_oracle_compare,
)

__version__ = "0.1.0"
