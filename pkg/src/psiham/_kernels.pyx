# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled product-integration kernels; same contract as ``_kernels_py``.

Power tables come from numpy (vectorised ``pow``); the weighted sums run in C
with four partial accumulators so the compiler can overlap the additions.
"""

import numpy as np

from libc.math cimport pow

BACKEND = "cython"


cdef inline double _dot(const double* w, const double* x_rev_end, Py_ssize_t k) noexcept nogil:
    # sum_{i<k} w[i] * x[-i], walking x backwards from x_rev_end
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= k:
        s0 += w[i] * x_rev_end[-i]
        s1 += w[i + 1] * x_rev_end[-i - 1]
        s2 += w[i + 2] * x_rev_end[-i - 2]
        s3 += w[i + 3] * x_rev_end[-i - 3]
        i += 4
    while i < k:
        s0 += w[i] * x_rev_end[-i]
        i += 1
    return (s0 + s1) + (s2 + s3)


def _linear_tables(double gamma, Py_ssize_t n):
    i = np.arange(n + 1, dtype=np.float64)
    a = np.diff(i**gamma) / gamma
    b = np.diff(i ** (gamma + 1.0)) / (gamma + 1.0)
    lo = i[:-1]
    return np.ascontiguousarray((lo + 1.0) * a - b), np.ascontiguousarray(b - lo * a)


def linear_product_integral(values, double gamma, double h):
    cdef const double[::1] g = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0] - 1
    if n < 1:
        return 0.0
    wa_arr, wb_arr = _linear_tables(gamma, n)
    cdef const double[::1] wa = wa_arr
    cdef const double[::1] wb = wb_arr
    # node at distance i and i + 1 from the right endpoint
    cdef double acc = _dot(&wa[0], &g[n], n) + _dot(&wb[0], &g[n - 1], n)
    return pow(h, gamma) * acc


def constant_product_integral(values, double gamma, double h):
    f = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0] - 1
    if n < 1:
        return 0.0
    cdef const double[::1] d = np.ascontiguousarray(np.diff(f))
    cdef const double[::1] inc = np.ascontiguousarray(np.diff(np.arange(n + 1, dtype=np.float64) ** gamma))
    cdef double acc = _dot(&inc[0], &d[n - 1], n)
    return pow(h, gamma - 1.0) / gamma * acc


def linear_product_history(values, double gamma, double h):
    cdef const double[::1] g = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0] - 1
    out_arr = np.zeros(n + 1, dtype=np.float64)
    if n < 1:
        return out_arr
    cdef double[::1] out = out_arr
    wa_arr, wb_arr = _linear_tables(gamma, n)
    cdef const double[::1] wa = wa_arr
    cdef const double[::1] wb = wb_arr
    cdef double scale = pow(h, gamma)
    cdef Py_ssize_t k
    with nogil:
        for k in range(1, n + 1):
            out[k] = scale * (_dot(&wa[0], &g[k], k) + _dot(&wb[0], &g[k - 1], k))
    return out_arr


def constant_product_history(values, double gamma, double h):
    f = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0] - 1
    out_arr = np.zeros(n + 1, dtype=np.float64)
    if n < 1:
        return out_arr
    cdef double[::1] out = out_arr
    cdef const double[::1] d = np.ascontiguousarray(np.diff(f))
    cdef const double[::1] inc = np.ascontiguousarray(np.diff(np.arange(n + 1, dtype=np.float64) ** gamma))
    cdef double scale = pow(h, gamma - 1.0) / gamma
    cdef Py_ssize_t k
    with nogil:
        for k in range(1, n + 1):
            out[k] = scale * _dot(&inc[0], &d[k - 1], k)
    return out_arr
