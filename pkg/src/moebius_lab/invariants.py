"""Second-order Moebius invariants of a surface chart at a point.

Everything is jet-valued: the canonical light-cone lift Y (order 4), the
Schwarzian s and Hopf differential kappa (order 2), the null section N
completing {Y, Re Y_z, Im Y_z} to a basis of the rank-4 bundle V, and an
orthonormal jet frame psi of the normal complement used for the normal
connection D.

The Schwarzian is extracted as s = 4 <Y_zz, Y_zzbar>.  Derivation: kappa is
normal, so <kappa, Y_zzbar> = 0; pairing the lift equation
Y_zz + (s/2) Y = kappa with Y_zzbar and using <Y, Y_zzbar> = -1/2 (which
follows from differentiating <Y, Y_z> = 0) gives the formula.  It is
unit-tested against the defining perpendicularity.
"""

from dataclasses import dataclass

import numpy as np

from . import jets
from .config import DEFAULT, Tolerances
from .errors import ChartError, DegenerateInputError, MathDomainError
from .jets import Jet, JetVector
from .minkowski import gram_schmidt_lorentz, inner, norm2_hermitian, norm_hermitian
from .surfaces import CoordinateChange, SurfaceChart


@dataclass
class InvariantData:
    """Jet-valued invariant package at one point."""

    point: tuple
    n: int
    Y: JetVector
    Y_z: JetVector
    Y_zbar: JetVector
    Y_zz: JetVector
    Y_zzbar: JetVector
    s: Jet
    kappa: JetVector
    kappa_norm2: Jet  # <kappa, conj kappa>, real-valued jet
    N: JetVector
    psi: list
    umbilic: bool
    V_basis: list = None
    V_signs: tuple = ()

    @property
    def dim(self):
        return self.n + 2


def lift_jets(chart: SurfaceChart, u, v, order=5):
    """Order-`order` jets of the raw lift Y0 = (1, y)."""
    y = chart.eval_jets(u, v, order)
    tables = np.zeros((chart.dim, jets.TABLE, jets.TABLE), dtype=np.complex128)
    tables[0, 0, 0] = 1.0
    tables[1:] = y.a
    return JetVector(tables, order)


def canonical_lift(chart: SurfaceChart, u, v, tol: Tolerances = DEFAULT):
    """Scale Y0 = (1, y) so that <Y_z, Y_zbar> = 1/2 to all retained orders."""
    y0 = lift_jets(chart, u, v, order=5)
    y0z = jets.d_z(y0)
    y0zb = jets.d_zbar(y0)
    conf = inner(y0z, y0z)
    metric = inner(y0z, y0zb)
    scale = abs(metric.value)
    gate = max(tol.conformal_chart, getattr(chart, "fd_accuracy", 0.0))
    if abs(conf.value) > gate * (1.0 + scale):
        raise ChartError(
            f"chart is not conformal at (u,v)=({u:.4g},{v:.4g}): "
            f"<Y0_z,Y0_z> = {conf.value:.3e}"
        )
    if metric.value.real <= tol.conformal_chart:
        raise ChartError(f"degenerate metric at (u,v)=({u:.4g},{v:.4g})")
    # the metric pairing of a real chart is a real function; drop rounding dust
    # so the inverse square root keeps its real branch
    factor = jets.power(jets.re(metric) * 2.0, -0.5)
    return y0 * factor


def schwarzian(lift: JetVector) -> Jet:
    y_zz = jets.d_z(jets.d_z(lift))
    y_zzb = jets.d_zbar(jets.d_z(lift))
    return 4.0 * inner(y_zz, y_zzb)


def hopf(lift: JetVector, s: Jet) -> JetVector:
    y_zz = jets.d_z(jets.d_z(lift))
    return y_zz + lift * (s * 0.5)


def section_n(lift: JetVector, kappa: JetVector) -> JetVector:
    y_zzb = jets.d_zbar(jets.d_z(lift))
    kk = inner(kappa, jets.conj(kappa))
    return 2.0 * y_zzb + lift * (2.0 * kk)


def normal_project(w: JetVector, data: "InvariantData") -> JetVector:
    """Project onto the normal complement using the null frame {Y, Y_z, Y_zbar, N}."""
    out = w + data.Y * inner(w, data.N) + data.N * inner(w, data.Y)
    out = out - data.Y_z * (2.0 * inner(w, data.Y_zbar))
    out = out - data.Y_zbar * (2.0 * inner(w, data.Y_z))
    return out


def _check_normal(section: JetVector, data: "InvariantData"):
    scale = 1.0 + float(np.max(np.abs(section.value)))
    for probe in (data.Y, data.Y_z, data.Y_zbar, data.N):
        val = inner(section, probe).value
        if abs(val) > 1e-6 * scale:
            raise MathDomainError(
                f"section is not normal: pairing with the tangent frame is {val:.3e}"
            )


def normal_derivative(
    section: JetVector, data: "InvariantData", which: str, check: bool = True
) -> JetVector:
    """Normal connection D: Wirtinger derivative projected onto span(psi)."""
    if check:
        _check_normal(section, data)
    if which == "z":
        raw = jets.d_z(section)
    elif which == "zbar":
        raw = jets.d_zbar(section)
    else:
        raise ValueError(f"which must be 'z' or 'zbar', got {which!r}")
    order = raw.order
    out = None
    for psi in data.psi:
        term = psi * inner(raw, psi)
        out = term if out is None else out + term
    return JetVector(out.a, min(order, out.order))


def _normal_frame(data_partial, dim, seed=None, rank_tol=1e-9):
    """Orthonormal jet frame of the normal bundle.

    Candidates are either the caller's seed frame (kept in order, for
    smoothness across a grid) or the ambient standard basis pivoted by largest
    projected norm.  Gram-Schmidt runs at jet level; the restricted form is
    positive definite there, so plain normalization applies.
    """
    n = dim - 2
    want = n - 2
    psi = []
    if seed is not None:
        candidates = [np.asarray(s, dtype=float) for s in seed]
        pivot = False
    else:
        candidates = [np.eye(dim)[i] for i in range(dim)]
        pivot = True
    pool = [normal_project(JetVector.constant(c, order=5), data_partial) for c in candidates]
    while len(psi) < want:
        norms = [inner(c, c).value.real for c in pool]
        idx = int(np.argmax(norms)) if pivot else 0
        best = norms[idx]
        if best <= rank_tol:
            raise DegenerateInputError(
                "normal frame construction lost rank (degenerate surface data)"
            )
        chosen = pool.pop(idx)
        unit = chosen * jets.power(jets.re(inner(chosen, chosen)), -0.5)
        psi.append(unit)
        pool = [cand - unit * inner(cand, unit) for cand in pool]
    return psi


def compute_invariants(
    chart: SurfaceChart, u, v, psi_seed=None, tol: Tolerances = DEFAULT
) -> InvariantData:
    """Full invariant package at (u, v)."""
    lift = canonical_lift(chart, u, v, tol)
    y_z = jets.d_z(lift)
    y_zb = jets.d_zbar(lift)
    y_zz = jets.d_z(y_z)
    y_zzb = jets.d_zbar(y_z)
    s = 4.0 * inner(y_zz, y_zzb)
    kappa = y_zz + lift * (s * 0.5)
    kk = jets.re(inner(kappa, jets.conj(kappa)))
    n_sec = 2.0 * y_zzb + lift * (2.0 * kk)
    umbilic = norm_hermitian(kappa.value) < tol.umbilic * (
        1.0 + norm_hermitian(y_zz.value)
    )

    data = InvariantData(
        point=(float(u), float(v)),
        n=chart.n,
        Y=lift,
        Y_z=y_z,
        Y_zbar=y_zb,
        Y_zz=y_zz,
        Y_zzbar=y_zzb,
        s=s,
        kappa=kappa,
        kappa_norm2=kk,
        N=n_sec,
        psi=[],
        umbilic=umbilic,
    )
    data.psi = _normal_frame(data, chart.dim, seed=psi_seed, rank_tol=tol.rank)
    return data


def conformal_gauss_basis(data: InvariantData, rank_tol: float = 1e-9):
    """(V basis with signs, psi frame); orthonormalizes lazily and caches."""
    if not data.V_basis:
        basis, signs = gram_schmidt_lorentz(
            [
                data.Y.value.real,
                data.Y_z.value.real,
                data.Y_z.value.imag,
                data.Y_zzbar.value.real,
            ],
            rank_tol=rank_tol,
        )
        data.V_basis = basis
        data.V_signs = signs
    return data.V_basis, data.V_signs, data.psi


def willmore_residual(data: InvariantData) -> np.ndarray:
    """Value of D_zbar D_zbar kappa + (1/2) conj(s) kappa (complex vector)."""
    d1 = normal_derivative(data.kappa, data, "zbar", check=False)
    d2 = normal_derivative(d1, data, "zbar", check=False)
    return d2.value + 0.5 * np.conj(data.s.value) * data.kappa.value


def willmore_residual_norm(data: InvariantData) -> float:
    return norm_hermitian(willmore_residual(data))


# -- energy --------------------------------------------------------------


def energy_density(chart: SurfaceChart, u, v, tol: Tolerances = DEFAULT) -> float:
    """Pointwise Willmore integrand 4 <kappa, conj kappa> w.r.t. du dv."""
    y0 = lift_jets(chart, u, v, order=3)
    y0z = jets.d_z(y0)
    y0zb = jets.d_zbar(y0)
    metric = inner(y0z, y0zb)
    if metric.value.real <= tol.conformal_chart:
        raise ChartError(f"degenerate metric at (u,v)=({u:.4g},{v:.4g})")
    lift = y0 * jets.power(jets.re(metric) * 2.0, -0.5)
    y_zz = jets.d_z(jets.d_z(lift))
    y_zzb = jets.d_zbar(jets.d_z(lift))
    s = 4.0 * inner(y_zz, y_zzb)
    kappa = y_zz + lift * (s * 0.5)
    val = inner(kappa, jets.conj(kappa)).value.real
    return 4.0 * val


def willmore_energy(chart: SurfaceChart, width: int, height: int, box=None, tol: Tolerances = DEFAULT) -> float:
    """Quadrature of the energy integrand over a period box or a bounded box.

    Periodic charts use the periodic trapezoid rule (spectrally accurate);
    open charts use the composite trapezoid rule on the supplied box.
    """
    if width < 2 or height < 2:
        raise MathDomainError("energy grid needs at least 2 points per direction")
    if chart.periods and box is None:
        us, vs = chart.grid(width, height)
        total = 0.0
        for u in us:
            for v in vs:
                val = energy_density(chart, u, v, tol)
                if not np.isfinite(val):
                    raise MathDomainError(f"non-finite integrand at ({u:.4g},{v:.4g})")
                total += val
        area = chart.periods[0] * chart.periods[1]
        return total / (width * height) * area
    (u0, u1), (v0, v1) = box if box is not None else chart.box
    us = np.linspace(u0, u1, width)
    vs = np.linspace(v0, v1, height)
    grid = np.empty((width, height))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            grid[i, j] = energy_density(chart, u, v, tol)
    if not np.all(np.isfinite(grid)):
        raise MathDomainError("non-finite integrand on the energy grid")
    trapz = getattr(np, "trapezoid", None) or np.trapz
    return float(trapz(trapz(grid, vs, axis=1), us))


# -- coordinate covariance -------------------------------------------------


def classical_schwarzian(change: CoordinateChange, z: complex) -> complex:
    """S_z(w) = (w''/w')' - (1/2)(w''/w')^2 from closed-form derivatives."""
    _, w1, w2, w3 = change.forward_derivs(z, 3)
    q = w2 / w1
    return w3 / w1 - 1.5 * q * q


def transform_invariants(s, kappa, mu, change: CoordinateChange, z: complex):
    """Push (s, kappa, mu) at z into the coordinate w = change(z).

    Implements the covariance laws
    ``s~ = (s - S_z(w)) / w'^2``, ``kappa~ = kappa |w'| / w'^2`` and
    ``mu = mu~ w' + w''/w'`` solved for ``mu~``.
    """
    derivs = change.forward_derivs(z, 2)
    w1, w2 = derivs[1], derivs[2]
    s_new = (complex(s) - classical_schwarzian(change, z)) / (w1 * w1)
    kappa_new = np.asarray(kappa) * (abs(w1) / (w1 * w1))
    mu_new = (complex(mu) - w2 / w1) / w1
    return s_new, kappa_new, mu_new


# -- conformal Gauss map diagnostics --------------------------------------


def _eta_flip(table_stack):
    flipped = table_stack.copy()
    flipped[0] = -flipped[0]
    return flipped


def gauss_projector_jets(data: InvariantData):
    """Projector field onto V as a matrix of jet tables, order 3."""
    from . import _backend

    order = 3
    m = data.dim
    pairs = [
        (data.Y.a, _eta_flip(data.N.a)),
        (data.N.a, _eta_flip(data.Y.a)),
        (-2.0 * data.Y_z.a, _eta_flip(data.Y_zbar.a)),
        (-2.0 * data.Y_zbar.a, _eta_flip(data.Y_z.a)),
    ]
    proj = np.zeros((m, m, jets.TABLE, jets.TABLE), dtype=np.complex128)
    for left, right in pairs:
        for a in range(m):
            for b in range(m):
                proj[a, b] -= _backend.mul(left[a], right[b], order)
    return proj, order


def gauss_map_conformality(data: InvariantData):
    """(tr(pi_z pi_z), tr(pi_z pi_zbar)) values for the projector field.

    The first vanishes and the second is positive for every conformal chart:
    the central-sphere congruence is conformal regardless of the Willmore
    property.
    """
    from . import _backend

    proj, order = gauss_projector_jets(data)
    m = data.dim
    flat = proj.reshape(m * m, jets.TABLE, jets.TABLE)
    dz = jets.d_z(JetVector(flat, order)).a.reshape(m, m, jets.TABLE, jets.TABLE)
    dzb = jets.d_zbar(JetVector(flat, order)).a.reshape(m, m, jets.TABLE, jets.TABLE)
    c20 = 0.0 + 0.0j
    c11 = 0.0 + 0.0j
    for a in range(m):
        for b in range(m):
            c20 += _backend.mul(dz[a, b], dz[b, a], 0)[0, 0]
            c11 += _backend.mul(dz[a, b], dzb[b, a], 0)[0, 0]
    return c20, c11


def gauss_projector_value(data: InvariantData) -> np.ndarray:
    proj, _ = gauss_projector_jets(data)
    return proj[:, :, 0, 0].real
