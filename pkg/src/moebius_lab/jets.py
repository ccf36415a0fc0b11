"""Truncated bivariate Taylor jets in the two real domain coordinates (u, v).

A ``Jet`` holds the expansion of a complex-valued function about an evaluation
point.  Two normalizations of bivariate Taylor data are in common use; this
module stores **plain Taylor coefficients** (``taylor(i, j)`` multiplies
``u^i v^j``), which makes products exact truncated convolutions, and exposes
the **derivative-normalized** view through :meth:`Jet.coeff`:
``coeff(i, j) == taylor(i, j) * i! * j!`` is the mixed partial
``d^i/du^i d^j/dv^j`` at the point, i.e. the coefficient of
``u^i v^j / (i! j!)``.

The geometric pipeline carries jets of order <= 4.  Charts evaluate at order 5
internally so the canonical-lift conformal factor is honest at order 4; the
table size admits that one extra order and nothing beyond.

Wirtinger operators are ``d_z = (d_u - i d_v)/2`` and
``d_zbar = (d_u + i d_v)/2``; both lower the order by one.
"""

import math

import numpy as np

from . import _backend
from .errors import JetDomainError, UsageError

TABLE = _backend.TABLE
MAX_ORDER = TABLE - 1  # internal ceiling; public pipeline data stays at <= 4

_FACT = np.array([math.factorial(k) for k in range(TABLE)], dtype=float)
_FACT2 = np.outer(_FACT, _FACT)
_ROW = np.arange(1, TABLE, dtype=float)


def _check_order(order):
    if not 0 <= order <= MAX_ORDER:
        raise UsageError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
    return int(order)


class Jet:
    """One truncated Taylor expansion; immutable by convention."""

    __slots__ = ("c", "order")

    def __init__(self, table, order):
        self.c = np.asarray(table, dtype=np.complex128)
        self.order = _check_order(order)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value, order=4):
        c = np.zeros((TABLE, TABLE), dtype=np.complex128)
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def coordinate_u(cls, u0, order=4):
        c = np.zeros((TABLE, TABLE), dtype=np.complex128)
        c[0, 0] = u0
        if order >= 1:
            c[1, 0] = 1.0
        return cls(c, order)

    @classmethod
    def coordinate_v(cls, v0, order=4):
        c = np.zeros((TABLE, TABLE), dtype=np.complex128)
        c[0, 0] = v0
        if order >= 1:
            c[0, 1] = 1.0
        return cls(c, order)

    # -- accessors ----------------------------------------------------
    @property
    def value(self):
        return complex(self.c[0, 0])

    def taylor(self, i, j):
        """Coefficient of u^i v^j."""
        return complex(self.c[i, j])

    def coeff(self, i, j):
        """Mixed partial derivative d_u^i d_v^j (the 1/(i! j!) convention)."""
        return complex(self.c[i, j]) * _FACT2[i, j]

    def copy(self):
        return Jet(self.c.copy(), self.order)

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value:.6g})"

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c, min(self.order, other.order))
        out = self.c.copy()
        out[0, 0] += other
        return Jet(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self.__add__(-other if isinstance(other, Jet) else -complex(other))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return Jet(_backend.mul(self.c, other.c, order), order)
        return Jet(self.c * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other, self.order)
        _check_divisor(other)
        order = min(self.order, other.order)
        return Jet(_backend.div(self.c, other.c, order), order)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order) / self

    def __pow__(self, p):
        return power(self, p)


def _check_divisor(b):
    scale = 1.0 + float(np.max(np.abs(b.c)))
    if abs(b.c[0, 0]) <= 1e-14 * scale:
        raise JetDomainError(
            f"jet division by near-zero leading value {b.c[0, 0]:.3e}"
        )


def conj(x):
    """Pointwise complex conjugate (domain coordinates are real)."""
    if isinstance(x, JetVector):
        return JetVector(np.conj(x.a), x.order)
    return Jet(np.conj(x.c), x.order)


def re(x):
    if isinstance(x, JetVector):
        return JetVector(x.a.real.astype(np.complex128), x.order)
    return Jet(x.c.real.astype(np.complex128), x.order)


def im(x):
    if isinstance(x, JetVector):
        return JetVector(x.a.imag.astype(np.complex128), x.order)
    return Jet(x.c.imag.astype(np.complex128), x.order)


# -- derivatives -------------------------------------------------------


def _shift_u(table):
    out = np.zeros_like(table)
    out[..., :-1, :] = table[..., 1:, :] * _ROW[:, None]
    return out


def _shift_v(table):
    out = np.zeros_like(table)
    out[..., :, :-1] = table[..., :, 1:] * _ROW[None, :]
    return out


def _deriv(x, sign):
    if x.order < 1:
        raise JetDomainError("cannot differentiate an order-0 jet")
    table = 0.5 * (_shift_u(_table_of(x)) + sign * 1j * _shift_v(_table_of(x)))
    if isinstance(x, JetVector):
        return JetVector(table, x.order - 1)
    return Jet(table, x.order - 1)


def _table_of(x):
    return x.a if isinstance(x, JetVector) else x.c


def d_z(x):
    """Wirtinger derivative (d_u - i d_v)/2; order drops by one."""
    return _deriv(x, -1.0)


def d_zbar(x):
    """Wirtinger derivative (d_u + i d_v)/2; order drops by one."""
    return _deriv(x, +1.0)


def d_u(x):
    if x.order < 1:
        raise JetDomainError("cannot differentiate an order-0 jet")
    table = _shift_u(_table_of(x))
    if isinstance(x, JetVector):
        return JetVector(table, x.order - 1)
    return Jet(table, x.order - 1)


def d_v(x):
    if x.order < 1:
        raise JetDomainError("cannot differentiate an order-0 jet")
    table = _shift_v(_table_of(x))
    if isinstance(x, JetVector):
        return JetVector(table, x.order - 1)
    return Jet(table, x.order - 1)


# -- elementary functions ----------------------------------------------


def _compose(series, x):
    return Jet(_backend.compose(np.asarray(series, dtype=np.complex128), x.c, x.order), x.order)


def exp(x):
    x0 = x.value
    e0 = np.exp(x0)
    series = [e0 / _FACT[k] for k in range(x.order + 1)] + [0.0] * (MAX_ORDER - x.order)
    return _compose(series, x)


def sin(x):
    x0 = x.value
    cyc = [np.sin(x0), np.cos(x0), -np.sin(x0), -np.cos(x0)]
    series = [cyc[k % 4] / _FACT[k] for k in range(x.order + 1)]
    series += [0.0] * (MAX_ORDER - x.order)
    return _compose(series, x)


def cos(x):
    x0 = x.value
    cyc = [np.cos(x0), -np.sin(x0), -np.cos(x0), np.sin(x0)]
    series = [cyc[k % 4] / _FACT[k] for k in range(x.order + 1)]
    series += [0.0] * (MAX_ORDER - x.order)
    return _compose(series, x)


def _require_positive_real(x0, what):
    if not (x0.real > 0.0 and abs(x0.imag) <= 1e-9 * (1.0 + abs(x0.real))):
        raise JetDomainError(f"{what} requires a positive real leading value, got {x0:.6g}")


def power(x, p):
    """x**p via the Taylor series of t**p about value(x).

    Integer p works for any nonzero leading value (negative p divides);
    fractional p takes the principal branch and insists on a positive real
    leading value.
    """
    if isinstance(p, Jet):
        raise UsageError("jet exponents are not supported")
    p_int = int(round(p.real)) if np.isreal(p) else None
    if p_int is not None and p == p_int and p_int >= 0:
        out = Jet.constant(1.0, x.order)
        for _ in range(p_int):
            out = out * x
        return out
    x0 = x.value
    if p_int is None or p != p_int:
        _require_positive_real(x0, "fractional power")
    elif x0 == 0:
        raise JetDomainError("negative integer power of a zero leading value")
    series = []
    fall = 1.0
    for k in range(x.order + 1):
        series.append(fall * x0 ** (p - k) / _FACT[k])
        fall *= p - k
    series += [0.0] * (MAX_ORDER - x.order)
    return _compose(series, x)


def sqrt(x):
    """Real branch of the square root; leading value must be real positive."""
    _require_positive_real(x.value, "jet sqrt")
    return power(x, 0.5)


# -- jet vectors --------------------------------------------------------


class JetVector:
    """A stack of jets sharing order and base point (one per ambient component)."""

    __slots__ = ("a", "order")

    def __init__(self, tables, order):
        self.a = np.ascontiguousarray(tables, dtype=np.complex128)
        self.order = _check_order(order)

    @classmethod
    def from_jets(cls, jets):
        order = min(j.order for j in jets)
        return cls(np.stack([j.c for j in jets]), order)

    @classmethod
    def constant(cls, values, order=4):
        values = np.asarray(values)
        a = np.zeros((values.shape[0], TABLE, TABLE), dtype=np.complex128)
        a[:, 0, 0] = values
        return cls(a, order)

    @property
    def dim(self):
        return self.a.shape[0]

    @property
    def value(self):
        return self.a[:, 0, 0].copy()

    def component(self, i):
        return Jet(self.a[i], self.order)

    def __add__(self, other):
        return JetVector(self.a + other.a, min(self.order, other.order))

    def __sub__(self, other):
        return JetVector(self.a - other.a, min(self.order, other.order))

    def __neg__(self):
        return JetVector(-self.a, self.order)

    def __mul__(self, other):
        """Scale by a Jet or a plain scalar."""
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return JetVector(_backend.scale_vec(self.a, other.c, order), order)
        return JetVector(self.a * other, self.order)

    __rmul__ = __mul__

    def matmul(self, matrix):
        """Apply a constant (k, dim) matrix componentwise: returns matrix @ self."""
        return JetVector(np.einsum("ij,jkl->ikl", matrix, self.a), self.order)

    def __repr__(self):
        return f"JetVector(dim={self.dim}, order={self.order})"


# -- finite-difference oracle -------------------------------------------

# O(h^2) central stencils for derivatives 0..4, by half-width they need.
_STENCILS = {
    0: np.array([1.0]),
    1: np.array([-0.5, 0.0, 0.5]),
    2: np.array([1.0, -2.0, 1.0]),
    3: np.array([-0.5, 1.0, 0.0, -1.0, 0.5]),
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


def _centered(weights, size):
    out = np.zeros(size)
    r = len(weights) // 2
    mid = size // 2
    out[mid - r : mid + r + 1] = weights
    return out


def jet_from_samples(values, h, order):
    """Build a jet from uniform samples by O(h^2) central differences.

    ``values`` is a (2R+1, 2R+1) grid (or (2R+1, 2R+1, m) for a vector) of
    samples centred on the evaluation point with spacing ``h`` in both u and v.
    Orders up to 2 need R >= 1; orders 3 and 4 need R >= 2.  The stencil
    contractions run in extended precision so fourth-order cancellation does
    not eat the O(h^2) truncation accuracy; pass samples already computed in
    ``np.longdouble``/``np.clongdouble`` to benefit fully.
    """
    order = int(order)
    if not 0 <= order <= 4:
        raise UsageError("jet_from_samples supports orders 0..4")
    values = np.asarray(values)
    size = values.shape[0]
    if values.shape[1] != size or size % 2 == 0:
        raise UsageError("samples must form an odd square stencil")
    radius = size // 2
    need = 1 if order <= 2 else 2
    for k in range(order + 1):
        if len(_STENCILS[k]) // 2 > radius:
            need = max(need, len(_STENCILS[k]) // 2)
    if radius < need:
        raise UsageError(
            f"insufficient stencil: order {order} needs half-width {need}, got {radius}"
        )
    work = values.astype(np.clongdouble)
    hld = np.longdouble(h)
    vector = work.ndim == 3
    m = work.shape[2] if vector else 1
    flat = work.reshape(size, size, m)
    tables = np.zeros((m, TABLE, TABLE), dtype=np.complex128)
    for k in range(order + 1):
        wk = _centered(_STENCILS[k], size).astype(np.longdouble)
        for l in range(order + 1 - k):
            wl = _centered(_STENCILS[l], size).astype(np.longdouble)
            est = np.einsum("i,j,ijm->m", wk, wl, flat) / hld ** (k + l)
            tables[:, k, l] = (est / (_FACT[k] * _FACT[l])).astype(np.complex128)
    if vector:
        return JetVector(tables, order)
    return Jet(tables[0], order)


def from_holomorphic_taylor(derivs, order=4):
    """Bivariate jet of a holomorphic function from its complex derivatives.

    ``derivs[k]`` is the k-th complex derivative at the base point; the chain
    rule for z = u + iv turns these into the (u, v) Taylor table.
    """
    order = _check_order(order)
    c = np.zeros((TABLE, TABLE), dtype=np.complex128)
    for k in range(min(order, len(derivs) - 1) + 1):
        fk = derivs[k] / _FACT[k]
        for j in range(k + 1):
            c[k - j, j] = fk * math.comb(k, j) * (1j) ** j
    return Jet(c, order)


def substitute(f, u_inner, v_inner):
    """Compose a jet with two inner jets: f(U(u,v), V(u,v)).

    The constant terms of ``u_inner``/``v_inner`` must equal the base point
    ``f`` was expanded about; they are stripped before the Taylor sum.
    """
    order = min(f.order, u_inner.order, v_inner.order)
    du = u_inner.c.copy()
    du[0, 0] = 0.0
    dv = v_inner.c.copy()
    dv[0, 0] = 0.0
    pu = [None] * (order + 1)
    pv = [None] * (order + 1)
    unit = np.zeros((TABLE, TABLE), dtype=np.complex128)
    unit[0, 0] = 1.0
    pu[0] = unit
    pv[0] = unit
    for k in range(1, order + 1):
        pu[k] = _backend.mul(pu[k - 1], du, order)
        pv[k] = _backend.mul(pv[k - 1], dv, order)
    out = np.zeros((TABLE, TABLE), dtype=np.complex128)
    for i in range(order + 1):
        for j in range(order + 1 - i):
            fij = f.c[i, j]
            if fij != 0.0:
                out += fij * _backend.mul(pu[i], pv[j], order)
    return Jet(out, order)
