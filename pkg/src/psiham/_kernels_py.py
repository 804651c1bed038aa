"""Pure numpy product-integration kernels (fallback for ``_kernels``).

All kernels work on a uniform grid ``s_j = j h``, ``j = 0..N`` in the rescaled
variable and integrate exactly against the weakly singular weight
``(s_N - s)^(gamma - 1)``.  Results are NOT divided by ``Gamma(gamma)``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _increments(gamma: float, n: int) -> np.ndarray:
    i = np.arange(n + 1, dtype=float)
    return np.diff(i**gamma)


def _linear_weights(gamma: float, n: int) -> np.ndarray:
    # weights indexed by distance i = N - j from the right endpoint
    i = np.arange(n + 1, dtype=float)
    p0 = i**gamma
    p1 = i ** (gamma + 1.0)
    a = np.diff(p0) / gamma  # moments of sigma^(gamma-1), in units of h^gamma
    b = np.diff(p1) / (gamma + 1.0)  # moments of sigma^gamma / h
    lo = i[:-1]
    w = np.zeros(n + 1)
    w[:-1] += (lo + 1.0) * a - b
    w[1:] += b - lo * a
    return w


def linear_product_integral(values, gamma: float, h: float) -> float:
    """``int_0^{Nh} (Nh - s)^(gamma-1) g(s) ds`` for piecewise-linear ``g``."""
    g = np.asarray(values, dtype=float)
    n = g.size - 1
    w = _linear_weights(gamma, n)
    return float(h**gamma * np.dot(w, g[::-1]))


def constant_product_integral(values, gamma: float, h: float) -> float:
    """Same integral for ``g`` equal to the divided difference of ``values`` on each cell.

    ``values`` are nodal samples ``F_0..F_N``; on cell ``j`` the integrand is
    ``(F_{j+1} - F_j) / h``.  This is the L1 form of the Caputo derivative when
    ``gamma = 1 - alpha``.
    """
    f = np.asarray(values, dtype=float)
    n = f.size - 1
    d = np.diff(f)
    b = _increments(gamma, n)
    return float(h ** (gamma - 1.0) / gamma * np.dot(d, b[::-1]))


def linear_product_history(values, gamma: float, h: float) -> np.ndarray:
    """:func:`linear_product_integral` evaluated at every right endpoint ``s_n``."""
    g = np.asarray(values, dtype=float)
    n = g.size - 1
    out = np.zeros(n + 1)
    for k in range(1, n + 1):
        w = _linear_weights(gamma, k)
        out[k] = np.dot(w, g[k::-1])
    return h**gamma * out


def constant_product_history(values, gamma: float, h: float) -> np.ndarray:
    """:func:`constant_product_integral` evaluated at every right endpoint ``s_n``."""
    f = np.asarray(values, dtype=float)
    n = f.size - 1
    d = np.diff(f)
    b = _increments(gamma, n)
    out = np.zeros(n + 1)
    out[1:] = np.convolve(d, b)[:n]
    return h ** (gamma - 1.0) / gamma * out
