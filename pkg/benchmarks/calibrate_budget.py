"""Calibrate the fractional residual budget from the power-rule experiment.

    python3 benchmarks/calibrate_budget.py [--nodes 2048] [--residuals]

The exact solutions are combinations of normalised powers
``X^(k alpha) / Gamma(k alpha + 1)``; the residual check differentiates them
with the L1 scheme, so the error of that scheme on the power basis sets the
scale of an honest budget.  ``--residuals`` also prints the observed residual
of the forced tube and planar solutions for comparison.
"""

from __future__ import annotations

import argparse

import numpy as np

from psiham import PsiSpec, caputo_derivative_numeric, gamma_eval, make_problem
from psiham.verify import GridSpec, QuadParams, SeparableCandidate, residual_norm

ALPHAS = (0.3, 0.5, 0.7, 0.9)
SAFETY = 9.0


def power_basis_error(nodes: int) -> float:
    worst = 0.0
    for psi, a in ((PsiSpec.identity(), 0.0), (PsiSpec.logarithm(), 1.0)):
        for alpha in ALPHAS:
            for k in (1, 2, 3):
                beta = k * alpha
                f = lambda tau, psi=psi, a=a, beta=beta: psi.increment_array(a, tau) ** beta / gamma_eval(beta + 1)  # noqa: E731
                for t in a + np.array([0.05, 0.3, 1.0]):
                    x = psi.increment(a, t)
                    want = x ** (beta - alpha) / gamma_eval(beta - alpha + 1)
                    err = abs(caputo_derivative_numeric(alpha, f, psi, a, t, nodes=nodes) - want)
                    worst = max(worst, err)
    return worst


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=2048)
    parser.add_argument("--residuals", action="store_true")
    args = parser.parse_args()
    worst = power_basis_error(args.nodes)
    print(f"worst power-basis derivative error at {args.nodes} nodes: {worst:.2e}")
    print(f"suggested budget ({SAFETY:g}x): {SAFETY * worst:.1e}")
    if args.residuals:
        for app, params in (("tube-pressure", {"nu": 1.0, "P": 1.0}), ("planar", {"rho0": 1.0, "g": 0.7})):
            for alpha in (0.3, 0.6, 0.9):
                p = make_problem(app, alpha=alpha, psi="log", a=1.0, **params)
                grid = GridSpec.planar(1.0, n_x=4, n_y=4, n_t=6) if p.coupled else GridSpec.cylindrical(1.0, n_r=5, n_t=8)
                rep = residual_norm(p, SeparableCandidate.from_exact(p), grid, QuadParams(nodes=args.nodes))
                print(f"{app:<14} alpha={alpha:<4g} residual sup {rep.sup:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
