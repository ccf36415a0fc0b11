"""Closed-form conformal immersions into S^n, evaluable as jets.

Charts evaluate the Euclidean position y(u, v) on the unit sphere as a
:class:`~moebius_lab.jets.JetVector` (n+1 components) at any requested order,
plus a plain-value path used by the finite-difference oracle (any float dtype,
so stencils can be fed extended precision).

Chart spec mini-grammar: ``name[:key=value[,key=value]*]`` with decimal
values, e.g. ``product-torus:a=0.8`` or ``great-sphere:n=4``.
"""

import json
import math

import numpy as np

from . import jets
from .errors import ChartError, UsageError
from .jets import Jet, JetVector
from .minkowski import MobiusTransform


class SurfaceChart:
    """A conformal immersion with closed-form jets.

    ``jet_fn(u, v, order) -> (n+1, 6, 6)`` complex tables of y;
    ``value_fn(u, v, dtype) -> (n+1,)`` position in the requested dtype.
    ``periods`` is (P_u, P_v) for doubly periodic charts, else None with
    ``box`` giving a sensible default evaluation window.
    """

    def __init__(self, name, n, jet_fn, value_fn, periods=None, box=None, params=None,
                 fd_accuracy=0.0):
        self.name = name
        self.n = n
        self._jet_fn = jet_fn
        self._value_fn = value_fn
        self.periods = periods
        # nonzero for charts whose jets come from finite differences; feeds
        # the conformality gate so oracle charts are not rejected for noise
        self.fd_accuracy = fd_accuracy
        self.box = box if box is not None else ((0.0, periods[0]), (0.0, periods[1])) if periods else ((-1.0, 1.0), (-1.0, 1.0))
        self.params = dict(params or {})

    @property
    def dim(self):
        """Ambient Minkowski dimension n+2."""
        return self.n + 2

    def eval_jets(self, u, v, order=5):
        return JetVector(self._jet_fn(float(u), float(v), order), order)

    def position(self, u, v, dtype=np.float64):
        return self._value_fn(u, v, dtype)

    def grid(self, width, height):
        """Sample points covering one period box (periodic: endpoint excluded)."""
        (u0, u1), (v0, v1) = self.box
        if self.periods:
            us = u0 + (u1 - u0) * np.arange(width) / width
            vs = v0 + (v1 - v0) * np.arange(height) / height
        else:
            us = np.linspace(u0, u1, width)
            vs = np.linspace(v0, v1, height)
        return us, vs

    def __repr__(self):
        return f"SurfaceChart({self.name!r}, n={self.n})"


def _coords(u, v, order):
    return Jet.coordinate_u(u, order), Jet.coordinate_v(v, order)


def _clifford():
    s2 = 1.0 / math.sqrt(2.0)

    def jet_fn(u, v, order):
        uj, vj = _coords(u, v, order)
        comps = [jets.cos(uj) * s2, jets.sin(uj) * s2, jets.cos(vj) * s2, jets.sin(vj) * s2]
        return np.stack([c.c for c in comps])

    def value_fn(u, v, dtype):
        u = dtype(u)
        v = dtype(v)
        r = dtype(s2)
        return np.array([np.cos(u) * r, np.sin(u) * r, np.cos(v) * r, np.sin(v) * r])

    period = 2.0 * math.pi
    return SurfaceChart("clifford", 3, jet_fn, value_fn, periods=(period, period))


def _product_torus(a):
    if not 0.0 < a < 1.0:
        raise UsageError(f"product-torus needs 0 < a < 1, got a={a}")
    b = math.sqrt(1.0 - a * a)

    def jet_fn(u, v, order):
        uj, vj = _coords(u, v, order)
        comps = [
            jets.cos(uj * (1.0 / a)) * a,
            jets.sin(uj * (1.0 / a)) * a,
            jets.cos(vj * (1.0 / b)) * b,
            jets.sin(vj * (1.0 / b)) * b,
        ]
        return np.stack([c.c for c in comps])

    def value_fn(u, v, dtype):
        u = dtype(u) / dtype(a)
        v = dtype(v) / dtype(b)
        return np.array(
            [dtype(a) * np.cos(u), dtype(a) * np.sin(u), dtype(b) * np.cos(v), dtype(b) * np.sin(v)]
        )

    return SurfaceChart(
        "product-torus",
        3,
        jet_fn,
        value_fn,
        periods=(2.0 * math.pi * a, 2.0 * math.pi * b),
        params={"a": a, "b": b},
    )


def _great_sphere(n):
    n = int(n)
    if n < 3:
        raise UsageError(f"great-sphere needs n >= 3, got n={n}")

    def jet_fn(u, v, order):
        uj, vj = _coords(u, v, order)
        r2 = uj * uj + vj * vj
        denom = r2 + 1.0
        comps = [(2.0 * uj) / denom, (2.0 * vj) / denom, (1.0 - r2) / denom]
        tables = [c.c for c in comps]
        zero = np.zeros((jets.TABLE, jets.TABLE), dtype=np.complex128)
        tables += [zero] * (n + 1 - 3)
        return np.stack(tables)

    def value_fn(u, v, dtype):
        u = dtype(u)
        v = dtype(v)
        r2 = u * u + v * v
        d = 1.0 + r2
        out = np.zeros(n + 1, dtype=dtype)
        out[0] = 2.0 * u / d
        out[1] = 2.0 * v / d
        out[2] = (1.0 - r2) / d
        return out

    return SurfaceChart("great-sphere", n, jet_fn, value_fn, box=((-1.0, 1.0), (-1.0, 1.0)), params={"n": n})


_CATALOG = {
    "clifford": (_clifford, {}),
    "product-torus": (_product_torus, {"a": float}),
    "great-sphere": (_great_sphere, {"n": int}),
}


def catalog_names():
    return sorted(_CATALOG)


def catalog_get(spec: str) -> SurfaceChart:
    """Instantiate a catalog chart from its spec string."""
    name, _, tail = spec.partition(":")
    name = name.strip()
    if name not in _CATALOG:
        raise UsageError(f"unknown surface {name!r}; known: {', '.join(catalog_names())}")
    factory, schema = _CATALOG[name]
    kwargs = {}
    if tail:
        for item in tail.split(","):
            key, _, raw = item.partition("=")
            key = key.strip()
            if key not in schema:
                raise UsageError(f"surface {name!r} does not take parameter {key!r}")
            try:
                kwargs[key] = schema[key](raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {key!r}: {raw!r}") from exc
    return factory(**kwargs)


# -- wrappers -----------------------------------------------------------


def apply_mobius(chart: SurfaceChart, transform: MobiusTransform) -> SurfaceChart:
    """Move the surface by an ambient isometry of the light-cone model.

    The lift transforms linearly; the sphere position is recovered by
    projectivizing, which fails (point pushed through infinity) when the time
    component of the image is not positive.
    """
    matrix = transform.matrix
    if matrix.shape[0] != chart.dim:
        raise ValueError("transform dimension does not match chart")

    def jet_fn(u, v, order):
        y = chart._jet_fn(u, v, order)
        lift = np.zeros((chart.dim, jets.TABLE, jets.TABLE), dtype=np.complex128)
        lift[0, 0, 0] = 1.0
        lift[1:] = y
        moved = np.einsum("ij,jkl->ikl", matrix, lift)
        time = Jet(moved[0], order)
        if time.value.real <= 1e-12:
            raise ChartError(
                f"moebius image crossed infinity at (u,v)=({u:.4g},{v:.4g})"
            )
        out = np.stack([(Jet(moved[i], order) / time).c for i in range(1, chart.dim)])
        return out

    def value_fn(u, v, dtype):
        y = chart._value_fn(u, v, dtype)
        lift = np.concatenate([[dtype(1.0)], y])
        moved = matrix.astype(dtype) @ lift
        if moved[0] <= 0:
            raise ChartError(
                f"moebius image crossed infinity at (u,v)=({u:.4g},{v:.4g})"
            )
        return moved[1:] / moved[0]

    return SurfaceChart(
        chart.name + "+mobius",
        chart.n,
        jet_fn,
        value_fn,
        periods=chart.periods,
        box=chart.box,
        params=chart.params,
        fd_accuracy=chart.fd_accuracy,
    )


class CoordinateChange:
    """Holomorphic coordinate change w(z) with closed-form jets.

    Built-in family: linear ``cz``, affine ``az+b`` and linear-fractional
    ``(az+b)/(cz+d)``.  Subclasses may override the four evaluation methods to
    supply other closed forms.
    """

    def __init__(self, a, b, c, d):
        det = a * d - b * c
        if abs(det) < 1e-14:
            raise UsageError("coordinate change must have nonzero determinant")
        self.abcd = (complex(a), complex(b), complex(c), complex(d))

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def linear(cls, factor):
        return cls(factor, 0.0, 0.0, 1.0)

    @classmethod
    def affine(cls, a, b):
        return cls(a, b, 0.0, 1.0)

    @classmethod
    def lft(cls, a, b, c, d):
        return cls(a, b, c, d)

    def forward(self, z):
        a, b, c, d = self.abcd
        return (a * z + b) / (c * z + d)

    def forward_derivs(self, z, count):
        """[w, w', ..., w^(count)] at z."""
        a, b, c, d = self.abcd
        det = a * d - b * c
        den = c * z + d
        out = [(a * z + b) / den]
        for m in range(1, count + 1):
            out.append(det * (-1) ** (m - 1) * math.factorial(m) * c ** (m - 1) / den ** (m + 1))
        return out

    def _inverse_change(self):
        a, b, c, d = self.abcd
        return CoordinateChange(d, -b, -c, a)

    def inverse(self, w):
        return self._inverse_change().forward(w)

    def inverse_derivs(self, w, count):
        return self._inverse_change().forward_derivs(w, count)


def apply_coordinate_change(chart: SurfaceChart, change: CoordinateChange) -> SurfaceChart:
    """Reparametrize: the new chart evaluates y at z = w^{-1}(new coordinate)."""

    def jet_fn(u, v, order):
        w0 = complex(u, v)
        z0 = change.inverse(w0)
        wz = change.forward_derivs(z0, 1)[1]
        if abs(wz) < 1e-12:
            raise ChartError(f"coordinate change singular (w_z = 0) at z = {z0:.6g}")
        inner_jet = jets.from_holomorphic_taylor(change.inverse_derivs(w0, order), order)
        u_inner = jets.re(inner_jet)
        v_inner = jets.im(inner_jet)
        base = chart._jet_fn(z0.real, z0.imag, order)
        out = np.stack(
            [jets.substitute(Jet(tab, order), u_inner, v_inner).c for tab in base]
        )
        return out

    def value_fn(u, v, dtype):
        z0 = change.inverse(complex(u, v))
        return chart._value_fn(z0.real, z0.imag, dtype)

    return SurfaceChart(
        chart.name + "+coord",
        chart.n,
        jet_fn,
        value_fn,
        periods=None,
        box=chart.box,
        params=chart.params,
        fd_accuracy=chart.fd_accuracy,
    )


# -- finite-difference oracle charts -------------------------------------


def sampled_chart(chart: SurfaceChart, h: float = 1e-3) -> SurfaceChart:
    """Cross-validation wrapper: jets rebuilt from 5x5 value stencils.

    Deliberately lower accuracy (documented O(h^2)); samples are taken in
    extended precision so fourth-order stencils stay meaningful.  Orders above
    4 are reported with vanishing top coefficients, which leaves every scalar
    the pipeline reports unchanged (they depend on the 4-jet of y only).
    """

    def jet_fn(u, v, order):
        fd_order = min(order, 4)
        stencil = np.empty((5, 5, chart.n + 1), dtype=np.clongdouble)
        for i in range(5):
            for j in range(5):
                stencil[i, j] = chart._value_fn(
                    np.longdouble(u) + (i - 2) * np.longdouble(h),
                    np.longdouble(v) + (j - 2) * np.longdouble(h),
                    np.clongdouble,
                )
        jv = jets.jet_from_samples(stencil, h, fd_order)
        return jv.a

    return SurfaceChart(
        chart.name + "+fd",
        chart.n,
        jet_fn,
        chart._value_fn,
        periods=chart.periods,
        box=chart.box,
        params=chart.params,
        fd_accuracy=100.0 * h * h,
    )


def grid_chart_from_json(payload) -> SurfaceChart:
    """Chart backed by an imported value grid.

    Payload schema: ``{"n": int, "du": float, "dv": float,
    "values": [[[y components]]]}`` with values[iu][iv] the position at
    (iu*du, iv*dv).  Evaluation is restricted to nodes with a full 5x5
    neighbourhood and uses the finite-difference jet builder, so accuracy is
    the oracle's O(h^2), not closed-form.
    """
    if isinstance(payload, (str, bytes)):
        payload = json.loads(payload)
    n = int(payload["n"])
    du = float(payload["du"])
    dv = float(payload["dv"])
    values = np.asarray(payload["values"], dtype=float)
    if values.ndim != 3 or values.shape[2] != n + 1:
        raise UsageError("grid import: values must be [iu][iv][component]")
    if abs(du - dv) > 1e-15 * max(du, dv):
        raise UsageError("grid import: du and dv must match for the FD stencils")

    def jet_fn(u, v, order):
        iu = int(round(u / du))
        iv = int(round(v / dv))
        if abs(u - iu * du) > 1e-9 * du or abs(v - iv * dv) > 1e-9 * dv:
            raise UsageError("grid chart is only evaluable at its own nodes")
        if not (2 <= iu < values.shape[0] - 2 and 2 <= iv < values.shape[1] - 2):
            raise UsageError("grid chart node lacks the 5x5 stencil margin")
        stencil = values[iu - 2 : iu + 3, iv - 2 : iv + 3]
        return jets.jet_from_samples(stencil, du, min(order, 4)).a

    def value_fn(u, v, dtype):
        iu = int(round(u / du))
        iv = int(round(v / dv))
        return values[iu, iv].astype(dtype)

    box = ((2 * du, (values.shape[0] - 3) * du), (2 * dv, (values.shape[1] - 3) * dv))
    return SurfaceChart("grid-import", n, jet_fn, value_fn, box=box, fd_accuracy=100.0 * du * du)


def conformality_defect(chart: SurfaceChart, u, v):
    """(|<Y0_z,Y0_z>|, <Y0_z,Y0_zbar>, ||y|-1|) at a point, value level."""
    from .minkowski import inner  # local import to avoid a cycle at module load

    y = chart.eval_jets(u, v, order=3)
    lift = np.zeros((chart.dim, jets.TABLE, jets.TABLE), dtype=np.complex128)
    lift[0, 0, 0] = 1.0
    lift[1:] = y.a
    y0 = JetVector(lift, y.order)
    y0z = jets.d_z(y0)
    y0zb = jets.d_zbar(y0)
    zz = inner(y0z, y0z).value
    zzb = inner(y0z, y0zb).value
    sphere = abs(float(np.linalg.norm(y.value.real)) - 1.0)
    return abs(zz), zzb, sphere
