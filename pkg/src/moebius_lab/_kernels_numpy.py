"""Pure-numpy jet kernels (fallback backend).

Coefficient tables are dense (6, 6) complex128 arrays holding plain Taylor
coefficients: entry [i, j] multiplies u^i v^j.  Entries with i + j > order are
kept at zero.  Products are truncated 2-D convolutions; here they are driven
through a precomputed (36, 36, 36) convolution tensor so each call is a couple
of BLAS-sized contractions instead of Python loops.
"""

import numpy as np

TABLE = 6  # table side; supports jet order <= 5

_IDX = [(i, j) for i in range(TABLE) for j in range(TABLE)]

_CONV3 = np.zeros((TABLE * TABLE, TABLE * TABLE, TABLE * TABLE))
for _o, (_i, _j) in enumerate(_IDX):
    for _p, (_k, _l) in enumerate(_IDX):
        _m, _n = _i - _k, _j - _l
        if 0 <= _m < TABLE and 0 <= _n < TABLE:
            _CONV3[_o, _p, _m * TABLE + _n] = 1.0
_CONV2 = _CONV3.reshape(TABLE * TABLE, -1)

_ORDER_MASK = np.zeros((TABLE, TABLE, TABLE))
for _k in range(TABLE):
    for _i in range(TABLE):
        for _j in range(TABLE):
            if _i + _j <= _k:
                _ORDER_MASK[_k, _i, _j] = 1.0


def mul(a, b, order):
    """Truncated product of two coefficient tables."""
    mb = _CONV3 @ b.ravel()
    out = (mb @ a.ravel()).reshape(TABLE, TABLE)
    out *= _ORDER_MASK[order]
    return out


def div(a, b, order):
    """Truncated quotient a/b; caller guarantees |b[0,0]| is usable."""
    b00 = b[0, 0]
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    out[0, 0] = a[0, 0] / b00
    for g in range(1, order + 1):
        for i in range(g + 1):
            j = g - i
            acc = np.sum(b[i::-1, j::-1][: i + 1, : j + 1] * out[: i + 1, : j + 1])
            out[i, j] = (a[i, j] - acc) / b00
    return out


def pair(a_vec, b_vec, signs, order):
    """Metric pairing of two jet vectors: sum_c signs[c] * a_c * b_c."""
    m = a_vec.shape[0]
    a2 = (signs[:, None] * a_vec.reshape(m, -1))
    g = np.einsum("cp,cq->pq", a2, b_vec.reshape(m, -1))
    out = (_CONV2 @ g.ravel()).reshape(TABLE, TABLE)
    out *= _ORDER_MASK[order]
    return out


def scale_vec(a_vec, f, order):
    """Multiply every component of a jet vector by the scalar jet f."""
    m = a_vec.shape[0]
    mf = _CONV3 @ f.ravel()
    out = (a_vec.reshape(m, -1) @ mf.T).reshape(m, TABLE, TABLE)
    out *= _ORDER_MASK[order]
    return out


def compose(series, x, order):
    """Evaluate sum_k series[k] * t^k with t = x minus its constant term."""
    t = x.copy()
    t[0, 0] = 0.0
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    out[0, 0] = series[order]
    for k in range(order - 1, -1, -1):
        out = mul(out, t, order)
        out[0, 0] += series[k]
    return out
