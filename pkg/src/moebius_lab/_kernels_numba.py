"""Numba-jitted twins of the numpy jet kernels.

Same contracts as ``_kernels_numpy``; explicit loops over the (6, 6) Taylor
tables, compiled nopython with the GIL released so grid sweeps can be threaded.
"""

import numpy as np
from numba import njit

TABLE = 6


@njit(cache=True, nogil=True)
def _mul_into(a, b, order, out):
    for i in range(order + 1):
        for j in range(order + 1 - i):
            acc = 0.0 + 0.0j
            for k in range(i + 1):
                for l in range(j + 1):
                    acc += a[k, l] * b[i - k, j - l]
            out[i, j] = acc


@njit(cache=True, nogil=True)
def mul(a, b, order):
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    _mul_into(a, b, order, out)
    return out


@njit(cache=True, nogil=True)
def div(a, b, order):
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    b00 = b[0, 0]
    out[0, 0] = a[0, 0] / b00
    for g in range(1, order + 1):
        for i in range(g + 1):
            j = g - i
            acc = 0.0 + 0.0j
            for k in range(i + 1):
                for l in range(j + 1):
                    acc += b[i - k, j - l] * out[k, l]
            out[i, j] = (a[i, j] - acc) / b00
    return out


@njit(cache=True, nogil=True)
def pair(a_vec, b_vec, signs, order):
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    m = a_vec.shape[0]
    for i in range(order + 1):
        for j in range(order + 1 - i):
            acc = 0.0 + 0.0j
            for c in range(m):
                part = 0.0 + 0.0j
                for k in range(i + 1):
                    for l in range(j + 1):
                        part += a_vec[c, k, l] * b_vec[c, i - k, j - l]
                acc += signs[c] * part
            out[i, j] = acc
    return out


@njit(cache=True, nogil=True)
def scale_vec(a_vec, f, order):
    m = a_vec.shape[0]
    out = np.zeros((m, TABLE, TABLE), dtype=np.complex128)
    for c in range(m):
        _mul_into(a_vec[c], f, order, out[c])
    return out


@njit(cache=True, nogil=True)
def compose(series, x, order):
    t = x.copy()
    t[0, 0] = 0.0
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    out[0, 0] = series[order]
    scratch = np.zeros((TABLE, TABLE), dtype=np.complex128)
    for k in range(order - 1, -1, -1):
        scratch[:, :] = 0.0
        _mul_into(out, t, order, scratch)
        out[:, :] = scratch
        out[0, 0] += series[k]
    return out
