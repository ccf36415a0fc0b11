"""Adapted frames, their Maurer-Cartan form, and the loop-parameter family.

The frame columns are (X+, X-, P+, P-, psi_1..psi_{n-2}) with
X+- = (+-Y + Yhat)/sqrt(2) and P = 2 Y_zbar + conj(mu) Y split into real and
imaginary parts.  The connection alpha = F^{-1} dF splits into a (1,0) part
alpha' (assembled in closed form from mu, rho, gamma, k, d) and its
conjugate.  Deforming the off-diagonal blocks by a unit complex parameter
gives the one-parameter family of connections whose simultaneous flatness
certifies the variational (Willmore) property of the underlying surface; the
flatness defect is measured numerically on grids.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .config import DEFAULT, Tolerances
from .errors import FrameError, UsageError
from .invariants import (
    InvariantData,
    compute_invariants,
    normal_derivative,
    willmore_residual,
)
from .jets import JetVector
from .lifts import LLiftData, MuSpec, build_lift
from .minkowski import eta, inner, norm_hermitian
from .surfaces import SurfaceChart

_SQRT2 = math.sqrt(2.0)


@dataclass
class FramePoint:
    """Adapted frame and closed-form connection data at one point."""

    F: np.ndarray  # (m, m) real, columns X+, X-, P+, P-, psi
    A: np.ndarray  # (2, 2) complex
    B: np.ndarray  # (n, 2) complex
    C: np.ndarray  # (n, n) complex
    gamma: np.ndarray  # (n-2,)
    k: np.ndarray  # (n-2,)
    d: np.ndarray  # (n-2, n-2)
    alpha_prime: np.ndarray  # (m, m) complex


def maurer_cartan_closed(data: InvariantData, lift: LLiftData) -> FramePoint:
    """Assemble F and the alpha' blocks from the invariant scalars."""
    m = data.dim
    n = data.n
    mu = lift.mu.value
    rho = lift.rho.value

    x_plus = ((data.Y + lift.Yhat) * (1.0 / _SQRT2)).value.real
    x_minus = ((-data.Y + lift.Yhat) * (1.0 / _SQRT2)).value.real
    p_vec = (2.0 * data.Y_zbar + data.Y * np.conj(mu)).value
    p_plus = p_vec.real
    p_minus = p_vec.imag
    psi_vals = [p.value.real for p in data.psi]
    F = np.column_stack([x_plus, x_minus, p_plus, p_minus] + psi_vals)

    gram = F.T @ eta(m) @ F
    target = np.diag([-1.0] + [1.0] * (m - 1))
    defect = float(np.max(np.abs(gram - target)))
    if defect > 1e-8:
        raise FrameError(f"adapted frame degenerate: Gram defect {defect:.3e}")

    gamma = np.array([2.0 * inner(lift.L, p).value for p in data.psi])
    kvec = np.array([2.0 * inner(data.kappa, p).value for p in data.psi])
    dmat = np.zeros((n - 2, n - 2), dtype=complex)
    psi_z = [jets.d_z(p) for p in data.psi]
    for b in range(n - 2):
        for a in range(n - 2):
            dmat[a, b] = 2.0 * inner(psi_z[b], data.psi[a]).value

    A = 0.5 * np.array([[0.0, mu], [mu, 0.0]], dtype=complex)
    B = np.zeros((n, 2), dtype=complex)
    B[0, 0] = rho + 1.0
    B[1, 0] = -1j * (rho + 1.0)
    B[0, 1] = rho - 1.0
    B[1, 1] = -1j * (rho - 1.0)
    B[2:, 0] = gamma
    B[2:, 1] = gamma
    B *= 1.0 / (2.0 * _SQRT2)
    C = np.zeros((n, n), dtype=complex)
    C[0, 1] = 1j * mu
    C[1, 0] = -1j * mu
    C[0, 2:] = -kvec
    C[1, 2:] = -1j * kvec
    C[2:, 0] = kvec
    C[2:, 1] = 1j * kvec
    C[2:, 2:] = dmat
    C *= 0.5

    alpha = np.zeros((m, m), dtype=complex)
    alpha[0:2, 0:2] = A
    alpha[2:, 0:2] = B
    alpha[0:2, 2:] = np.diag([1.0, -1.0]) @ B.T
    alpha[2:, 2:] = C
    return FramePoint(F=F, A=A, B=B, C=C, gamma=gamma, k=kvec, d=dmat, alpha_prime=alpha)


def adapted_frame(data: InvariantData, lift: LLiftData) -> FramePoint:
    return maurer_cartan_closed(data, lift)


def p_sections_alternative(data: InvariantData, lift: LLiftData):
    """The equivalent representation (Re(2Y_z + mu Y), -Im(2Y_z + mu Y))."""
    mu = lift.mu.value
    q = (2.0 * data.Y_z + data.Y * mu).value
    return q.real, -q.imag


# -- structure equations -----------------------------------------------------


def structure_residuals(data: InvariantData) -> dict:
    """Pointwise Gauss / Codazzi / Ricci residual norms.

    These vanish for every conformal immersion (they are integrability
    conditions, not the variational property), which makes them a strong
    whole-pipeline self-check.
    """
    kappa_bar = jets.conj(data.kappa)
    s_zb = jets.d_zbar(data.s).value
    dk = normal_derivative(data.kappa, data, "z", check=False)
    dkb = normal_derivative(kappa_bar, data, "z", check=False)
    gauss = 0.5 * s_zb - 3.0 * inner(data.kappa, dkb).value - inner(dk, kappa_bar).value

    codazzi_vec = willmore_residual(data).imag
    codazzi = max(float(inner(codazzi_vec, codazzi_vec)), 0.0) ** 0.5

    ricci = 0.0
    for psi in data.psi:
        dz_psi = normal_derivative(psi, data, "z", check=False)
        dzb_psi = normal_derivative(psi, data, "zbar", check=False)
        curv = (
            normal_derivative(dz_psi, data, "zbar", check=False).value
            - normal_derivative(dzb_psi, data, "z", check=False).value
        )
        expected = (
            2.0 * inner(psi, data.kappa).value * np.conj(data.kappa.value)
            - 2.0 * inner(psi, kappa_bar).value * data.kappa.value
        )
        ricci = max(ricci, norm_hermitian(curv - expected))
    return {"gauss": abs(gauss), "codazzi": codazzi, "ricci": ricci}


# -- grid fields -------------------------------------------------------------


@dataclass
class FrameField:
    """Per-point frames, connection forms and scalar diagnostics on a grid."""

    us: np.ndarray
    vs: np.ndarray
    hu: float
    hv: float
    periodic: bool
    F: np.ndarray  # (W, H, m, m)
    alpha_prime: np.ndarray  # (W, H, m, m) complex
    scalars: dict  # name -> (W, H) array
    n: int
    mu_desc: str = ""

    @property
    def dim(self):
        return self.n + 2


def frame_field(
    chart: SurfaceChart,
    mu_spec: MuSpec,
    width: int,
    height: int,
    box=None,
    tol: Tolerances = DEFAULT,
) -> FrameField:
    """Evaluate the full pipeline on a grid.

    The normal frame is seeded row-major from the previous grid point so the
    frame field (and hence the numeric Maurer-Cartan form) stays smooth.
    """
    if width < 2 or height < 2:
        raise UsageError("frame field needs at least a 2x2 grid")
    if box is not None:
        (u0, u1), (v0, v1) = box
        us = np.linspace(u0, u1, width)
        vs = np.linspace(v0, v1, height)
        periodic = False
    else:
        us, vs = chart.grid(width, height)
        periodic = chart.periods is not None and mu_spec.periodic
    m = chart.dim
    F = np.empty((width, height, m, m))
    alpha = np.empty((width, height, m, m), dtype=complex)
    names = (
        "s_re",
        "s_im",
        "kappa_norm2",
        "theta_abs",
        "rho_re",
        "rho_im",
        "LL_abs",
        "residual_norm",
        "harmonicity_norm",
        "energy_density",
    )
    scalars = {name: np.empty((width, height)) for name in names}
    row_seed = None
    for i, u in enumerate(us):
        seed = row_seed
        for j, v in enumerate(vs):
            data = compute_invariants(chart, u, v, psi_seed=seed, tol=tol)
            lift = build_lift(data, mu_spec, tol)
            point = maurer_cartan_closed(data, lift)
            F[i, j] = point.F
            alpha[i, j] = point.alpha_prime
            lhs = 2.0 * normal_derivative(lift.L, data, "zbar", check=False).value - (
                np.conj(lift.mu.value) * lift.L.value
            )
            scalars["s_re"][i, j] = data.s.value.real
            scalars["s_im"][i, j] = data.s.value.imag
            scalars["kappa_norm2"][i, j] = data.kappa_norm2.value.real
            scalars["theta_abs"][i, j] = abs(lift.theta.value)
            scalars["rho_re"][i, j] = lift.rho.value.real
            scalars["rho_im"][i, j] = lift.rho.value.imag
            scalars["LL_abs"][i, j] = abs(lift.LL)
            scalars["residual_norm"][i, j] = norm_hermitian(willmore_residual(data))
            scalars["harmonicity_norm"][i, j] = norm_hermitian(lhs)
            scalars["energy_density"][i, j] = 4.0 * data.kappa_norm2.value.real
            seed = [p.value.real for p in data.psi]
            if j == 0:
                row_seed = seed
    hu = float(us[1] - us[0])
    hv = float(vs[1] - vs[0])
    return FrameField(
        us=us,
        vs=vs,
        hu=hu,
        hv=hv,
        periodic=periodic,
        F=F,
        alpha_prime=alpha,
        scalars=scalars,
        n=chart.n,
        mu_desc=mu_spec.describe(),
    )


def _central_diff(field_arr, h, axis, periodic):
    """Central difference along a grid axis; boundary rows valid only when periodic."""
    fwd = np.roll(field_arr, -1, axis=axis)
    bwd = np.roll(field_arr, 1, axis=axis)
    return (fwd - bwd) / (2.0 * h)


def _interior(arr, periodic):
    if periodic:
        return arr
    return arr[1:-1, 1:-1]


def realign_frames(F: np.ndarray, dim: int, threshold: float = 0.5):
    """Flip normal-frame column signs to restore row-major continuity."""
    out = F.copy()
    width, height = out.shape[:2]
    for i in range(width):
        for j in range(height):
            if i == 0 and j == 0:
                continue
            prev = out[i, j - 1] if j > 0 else out[i - 1, j]
            cur = out[i, j]
            for col in range(4, dim):
                if np.linalg.norm(cur[:, col] - prev[:, col]) > np.linalg.norm(
                    cur[:, col] + prev[:, col]
                ):
                    cur[:, col] = -cur[:, col]
            out[i, j] = cur
    return out


def maurer_cartan_numeric(field: FrameField, realign: bool = True):
    """(alpha_u, alpha_v) by central differences of F, with F^{-1} = eta F^T eta.

    A jump between neighbouring frames beyond the continuity threshold first
    triggers a sign realignment of the normal columns; if the jump survives,
    the frame field is genuinely discontinuous and an error is raised.
    """
    F = field.F
    m = field.dim
    threshold = 0.5

    def max_jump(arr):
        ju = np.max(np.abs(np.diff(arr, axis=0)))
        jv = np.max(np.abs(np.diff(arr, axis=1)))
        return max(float(ju), float(jv))

    if max_jump(F) > threshold:
        if realign:
            F = realign_frames(F, m, threshold)
        if max_jump(F) > threshold:
            raise FrameError(
                "frame field discontinuity exceeds the alignment threshold "
                f"({max_jump(F):.3f} > {threshold})"
            )
    e = eta(m)
    f_inv = np.einsum("ab,ijcb,cd->ijad", e, F, e)  # eta F^T eta at every node
    du = _central_diff(F, field.hu, 0, field.periodic)
    dv = _central_diff(F, field.hv, 1, field.periodic)
    alpha_u = np.einsum("ijab,ijbc->ijac", f_inv, du)
    alpha_v = np.einsum("ijab,ijbc->ijac", f_inv, dv)
    return _interior(alpha_u, field.periodic), _interior(alpha_v, field.periodic)


def closed_alpha_uv(field: FrameField):
    """Real-form (alpha_u, alpha_v) from the closed-form alpha'."""
    ap = field.alpha_prime
    app = np.conj(ap)
    return (ap + app), 1j * (ap - app)


# -- lambda family ------------------------------------------------------------


def _block_masks(m):
    k_mask = np.zeros((m, m), dtype=bool)
    k_mask[0:2, 0:2] = True
    k_mask[2:, 2:] = True
    return k_mask, ~k_mask


def lambda_samples(count: int) -> np.ndarray:
    """Equispaced points on the unit circle including +-1 (and +-i for 4|count)."""
    if count < 2:
        raise UsageError("need at least two lambda samples")
    return np.exp(2j * np.pi * np.arange(count) / count)


def alpha_lambda(alpha_prime, lam: complex):
    """Deformed real-form connection (alpha^lambda_u, alpha^lambda_v).

    The diagonal blocks (the subalgebra fixed by the involution) are kept; the
    off-diagonal blocks of the (1,0) part are scaled by 1/lambda and of the
    (0,1) part by lambda.  lambda = 1 returns the undeformed form exactly.
    """
    if abs(abs(lam) - 1.0) > 1e-12:
        raise UsageError(f"lambda must lie on the unit circle, got |lambda| = {abs(lam)}")
    m = alpha_prime.shape[-1]
    k_mask, p_mask = _block_masks(m)
    ap = alpha_prime
    app = np.conj(alpha_prime)
    az = ap * k_mask + ap * p_mask / lam
    azb = app * k_mask + app * p_mask * lam
    return az + azb, 1j * (az - azb)


def twist(matrix):
    """The involution Ad diag(-1,-1,1,...,1) on matrices."""
    m = matrix.shape[-1]
    d = np.ones(m)
    d[0] = d[1] = -1.0
    return d[..., :, None] * matrix * d[..., None, :]


def flatness_residual(alpha_u, alpha_v, hu, hv, periodic):
    """sup-norm of d(alpha) + alpha ^ alpha over the usable grid.

    Computes du(alpha_v) - dv(alpha_u) + [alpha_u, alpha_v] with central
    differences; returns (sup, (i, j) of the arg max in the trimmed indexing).
    """
    if alpha_u.shape[0] < 5 or alpha_u.shape[1] < 5:
        raise UsageError("flatness residual needs at least 5 grid points per direction")
    dudv = _central_diff(alpha_v, hu, 0, periodic)
    dvdu = _central_diff(alpha_u, hv, 1, periodic)
    bracket = np.einsum("ijab,ijbc->ijac", alpha_u, alpha_v) - np.einsum(
        "ijab,ijbc->ijac", alpha_v, alpha_u
    )
    res = dudv - dvdu + bracket
    res = _interior(res, periodic)
    per_point = np.max(np.abs(res), axis=(2, 3))
    idx = np.unravel_index(int(np.argmax(per_point)), per_point.shape)
    return float(per_point[idx]), idx


@dataclass
class LambdaFamily:
    """Flatness sweep of the deformed connections over unit-circle samples."""

    lambdas: np.ndarray
    residuals: np.ndarray
    argmax_points: list
    floor: float
    threshold: float
    flat_all: bool
    rows: list = field(default_factory=list)


def lambda_sweep(field: FrameField, count: int = 16, tol: Tolerances = DEFAULT) -> LambdaFamily:
    """Flatness residual of alpha^lambda for each sample; noise floor from +-1.

    The +-1 samples are genuine Maurer-Cartan data, so their residual is pure
    discretization noise; the pass threshold is floor_factor times that floor.
    """
    lams = lambda_samples(count)
    residuals = np.empty(count)
    argmaxes = []
    offset = 0 if field.periodic else 1
    rows = []
    for idx, lam in enumerate(lams):
        au, av = alpha_lambda(field.alpha_prime, lam)
        sup, amax = flatness_residual(au, av, field.hu, field.hv, field.periodic)
        residuals[idx] = sup
        interior_idx = (amax[0] + offset, amax[1] + offset)
        argmaxes.append(interior_idx)
        rows.append(
            {
                "lambda_re": float(lam.real),
                "lambda_im": float(lam.imag),
                "u": float(field.us[interior_idx[0]]),
                "v": float(field.vs[interior_idx[1]]),
                "residual": sup,
            }
        )
    anchor = [i for i, lam in enumerate(lams) if abs(lam - 1.0) < 1e-12 or abs(lam + 1.0) < 1e-12]
    floor = max(max(residuals[i] for i in anchor), tol.flatness_floor_min)
    threshold = tol.flatness_floor_factor * floor
    flat_all = bool(np.all(residuals <= threshold))
    return LambdaFamily(
        lambdas=lams,
        residuals=residuals,
        argmax_points=argmaxes,
        floor=floor,
        threshold=threshold,
        flat_all=flat_all,
        rows=rows,
    )


# -- extended frame -----------------------------------------------------------


def pointwise_connection(chart: SurfaceChart, mu_spec: MuSpec, lam: complex, tol: Tolerances = DEFAULT):
    """Smooth (u, v) -> (alpha^lambda_u, alpha^lambda_v) with frame continuity.

    Carries the last normal frame as the seed for the next evaluation, so
    consecutive calls along a path see one smooth frame field.
    """
    state = {"seed": None}

    def connection(u, v):
        data = compute_invariants(chart, u, v, psi_seed=state["seed"], tol=tol)
        state["seed"] = [p.value.real for p in data.psi]
        lift = build_lift(data, mu_spec, tol)
        point = maurer_cartan_closed(data, lift)
        return alpha_lambda(point.alpha_prime, lam)

    return connection


@dataclass
class PathIntegration:
    frames: list
    points: list
    monodromy: float
    gauge_drift: float | None


def extended_frame_integrate(
    connection,
    path,
    F0: np.ndarray,
    steps_per_segment: int = 64,
    reference=None,
) -> PathIntegration:
    """Integrate dF = F alpha^lambda along a polyline with fixed-step RK4.

    ``connection(u, v)`` returns the pair (alpha_u, alpha_v).  For a closed
    path the monodromy defect ||F_end - F_0||_inf is reported (not raised: on
    non-flat data it *is* the curvature measurement).  When ``reference`` is
    given (a callable returning the adapted frame at a point), the constancy
    of F reference^{-1} along the path is reported as gauge drift.
    """
    path = [np.asarray(p, dtype=float) for p in path]
    if len(path) < 2:
        raise UsageError("path needs at least two points")
    F = np.array(F0, dtype=complex)
    frames = [F.copy()]
    points = [tuple(path[0])]
    gauge = []

    def rhs(F_cur, u, v, du, dv):
        au, av = connection(u, v)
        return F_cur @ (au * du + av * dv)

    for start, end in zip(path[:-1], path[1:]):
        delta = end - start
        h = 1.0 / steps_per_segment
        for step in range(steps_per_segment):
            t0 = step * h
            p0 = start + t0 * delta
            ph = start + (t0 + 0.5 * h) * delta
            p1 = start + (t0 + h) * delta
            k1 = rhs(F, p0[0], p0[1], delta[0], delta[1])
            k2 = rhs(F + 0.5 * h * k1, ph[0], ph[1], delta[0], delta[1])
            k3 = rhs(F + 0.5 * h * k2, ph[0], ph[1], delta[0], delta[1])
            k4 = rhs(F + h * k3, p1[0], p1[1], delta[0], delta[1])
            F = F + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        frames.append(F.copy())
        points.append(tuple(end))
        if reference is not None:
            ref = reference(end[0], end[1])
            gauge.append(F @ np.linalg.inv(ref))
    monodromy = float(np.max(np.abs(frames[-1] - frames[0])))
    drift = None
    if gauge:
        base = gauge[0]
        drift = max(float(np.max(np.abs(g - base))) for g in gauge)
    return PathIntegration(frames=frames, points=points, monodromy=monodromy, gauge_drift=drift)


# -- whole-surface verification ------------------------------------------------


@dataclass
class SurfaceVerification:
    willmore_by_residual: bool
    willmore_by_harmonicity: bool
    willmore_by_flatness: bool
    residual_sup: float
    harmonicity_sup: float
    structure_sup: dict
    family: LambdaFamily
    classifiers_agree: bool
    scalars: dict


def verify_surface(
    chart: SurfaceChart,
    mu_spec: MuSpec,
    width: int,
    height: int,
    lambda_count: int = 16,
    box=None,
    tol: Tolerances = DEFAULT,
    structure_points=None,
) -> SurfaceVerification:
    """Run the three equivalent Willmore classifiers over one grid.

    (1) sup of the variational residual, (2) sup of the lift-harmonicity
    defect 2 D_zbar L - conj(mu) L, (3) flatness of the whole deformed family.
    Their agreement on every chart is the operational content of the
    equivalence theorem this laboratory certifies.
    """
    if width < 5 or height < 5:
        raise UsageError("verification grids need at least 5x5 points")
    field = frame_field(chart, mu_spec, width, height, box=box, tol=tol)
    family = lambda_sweep(field, lambda_count, tol)
    residual_sup = float(np.max(field.scalars["residual_norm"]))
    harmonicity_sup = float(np.max(field.scalars["harmonicity_norm"]))
    by_residual = residual_sup < tol.willmore
    by_harmonicity = harmonicity_sup < 4.0 * tol.willmore
    by_flatness = family.flat_all

    structure = {"gauss": 0.0, "codazzi": 0.0, "ricci": 0.0}
    if structure_points is None:
        idx = np.linspace(0, len(field.us) - 1, 4, dtype=int)
        structure_points = [(field.us[i], field.vs[j]) for i in idx for j in idx]
    for u, v in structure_points:
        res = structure_residuals(compute_invariants(chart, u, v, tol=tol))
        for key in structure:
            structure[key] = max(structure[key], res[key])

    agree = by_residual == by_harmonicity == by_flatness
    return SurfaceVerification(
        willmore_by_residual=by_residual,
        willmore_by_harmonicity=by_harmonicity,
        willmore_by_flatness=by_flatness,
        residual_sup=residual_sup,
        harmonicity_sup=harmonicity_sup,
        structure_sup=structure,
        family=family,
        classifiers_agree=agree,
        scalars={name: float(np.max(np.abs(arr))) for name, arr in field.scalars.items()},
    )
