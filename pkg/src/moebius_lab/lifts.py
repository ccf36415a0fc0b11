"""Conformal Lorentzian 2-plane lifts.

A lift is fixed by one complex function mu through
``Yhat = N + conj(mu) Y_z + mu Y_zbar + (1/2)|mu|^2 Y``; the lift plane
span{Y, Yhat} is conformal exactly when mu solves the Riccati equation
``mu_z = mu^2/2 + s``.  This module provides the mu sources (constant
branches, explicit values, the meromorphic family for s = 0, a complex-ODE
integrator for holomorphic s), the derived quantities theta / rho / L, the
isotropy quadratic, and the pointwise surface classification flags.

Note on the wedge cross-checks: with ``wedge_inner(a,b,c,d) =
<a,c><b,d> - <a,d><b,c>`` the dual characterizations carry a minus sign,
``theta = -2 wedge_inner(Y, Y_z, Yhat, Yhat_z)`` and
``rho = -2 wedge_inner(Y, Y_zbar, Yhat, Yhat_z)``; expanding either side
against the frame relations fixes the sign unambiguously (the opposite
bivector pairing convention is also in circulation).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .config import DEFAULT, Tolerances
from .errors import MathDomainError, RiccatiBlowupError, UsageError
from .invariants import InvariantData, normal_derivative, willmore_residual
from .jets import Jet, JetVector
from .minkowski import inner, norm_hermitian, wedge_inner


# -- Riccati equation ------------------------------------------------------


def riccati_constant(s, tol: float = 1e-10):
    """Both constant solutions mu = +-sqrt(-2 s) for constant Schwarzian.

    Accepts a Jet (whose higher coefficients must vanish) or a plain number.
    """
    if isinstance(s, Jet):
        table = s.c.copy()
        s0 = table[0, 0]
        table[0, 0] = 0.0
        if float(np.max(np.abs(table))) > tol * (1.0 + abs(s0)):
            raise MathDomainError(
                "riccati_constant needs a constant Schwarzian; jet has "
                f"derivative coefficients up to {np.max(np.abs(table)):.3e}"
            )
    else:
        s0 = complex(s)
    root = complex(np.sqrt(complex(-2.0 * s0)))
    return root, -root


def riccati_integrate(
    s_fn,
    mu0,
    path,
    rtol: float = 1e-10,
    blowup: float = 1e8,
    min_step: float = 1e-12,
):
    """Integrate mu' = mu^2/2 + s(z) along a polyline in the z-plane.

    ``s_fn`` must be holomorphic along the path (the equation is a complex
    ODE only in that case).  Classic adaptive RK4 with step doubling; returns
    the list of mu values at every waypoint, starting with ``mu0``.  Solutions
    have movable poles, so |mu| is watched against ``blowup``.
    """
    path = [complex(z) for z in path]
    if len(path) < 2:
        raise UsageError("riccati path needs at least two waypoints")

    def rhs(z, mu):
        return 0.5 * mu * mu + s_fn(z)

    def rk4(z, mu, dz):
        k1 = rhs(z, mu)
        k2 = rhs(z + 0.5 * dz, mu + 0.5 * dz * k1)
        k3 = rhs(z + 0.5 * dz, mu + 0.5 * dz * k2)
        k4 = rhs(z + dz, mu + dz * k3)
        return mu + dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    out = [complex(mu0)]
    mu = complex(mu0)
    for z_start, z_end in zip(path[:-1], path[1:]):
        length = abs(z_end - z_start)
        if length == 0.0:
            out.append(mu)
            continue
        direction = (z_end - z_start) / length
        t = 0.0
        h = min(0.1, length)
        while t < length:
            h = min(h, length - t)
            z = z_start + t * direction
            big = rk4(z, mu, h * direction)
            half = rk4(z, mu, 0.5 * h * direction)
            small = rk4(z + 0.5 * h * direction, half, 0.5 * h * direction)
            err = abs(big - small)
            scale = rtol * (1.0 + abs(small))
            if err <= scale:
                mu = small + (small - big) / 15.0  # local extrapolation
                t += h
                if abs(mu) > blowup:
                    raise RiccatiBlowupError(
                        f"|mu| = {abs(mu):.3e} exceeded the blow-up bound near z = {z + h * direction:.6g}"
                    )
                if err < 0.25 * scale:
                    h *= 2.0
            else:
                h *= 0.5
                if h < min_step:
                    raise RiccatiBlowupError(
                        f"step size underflow near z = {z:.6g} (movable pole?)"
                    )
        out.append(mu)
    return out


def mu_jet_from_value(mu_value, s_jet: Jet, order: int = 4) -> Jet:
    """Jet of the local Riccati solution through mu_value.

    Holomorphy gives all z-derivatives recursively:
    mu' = mu^2/2 + s, mu'' = mu mu' + s', and so on.  Derivatives of s beyond
    the order carried by ``s_jet`` are taken as zero, which is exact for the
    constant-Schwarzian catalog.
    """
    def s_deriv(k):
        if k > s_jet.order:
            return 0.0 + 0.0j
        jet = s_jet
        for _ in range(k):
            jet = jets.d_z(jet)
        return jet.value

    m0 = complex(mu_value)
    m1 = 0.5 * m0 * m0 + s_deriv(0)
    m2 = m0 * m1 + s_deriv(1)
    m3 = m1 * m1 + m0 * m2 + s_deriv(2)
    m4 = 3.0 * m1 * m2 + m0 * m3 + s_deriv(3)
    return jets.from_holomorphic_taylor([m0, m1, m2, m3, m4], order)


# -- mu sources -------------------------------------------------------------


def _parse_complex(text: str) -> complex:
    cleaned = text.strip().replace("i", "j").replace("I", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex literal {text!r}") from exc


@dataclass(frozen=True)
class MuSpec:
    """Declarative choice of the lift parameter mu.

    kinds: ``zero``; ``constant`` / ``constant-`` (Riccati branches for a
    constant Schwarzian); ``explicit`` (a fixed complex value, no Riccati
    guarantee); ``meromorphic`` with parameter c (the pole family
    mu = -2/(z - c), solving the Riccati equation when s = 0).
    """

    kind: str
    parameter: complex = 0.0

    @classmethod
    def parse(cls, text: str) -> "MuSpec":
        text = text.strip()
        if text == "zero":
            return cls("zero")
        if text == "constant":
            return cls("constant")
        if text == "constant-":
            return cls("constant-")
        if text.startswith("meromorphic:"):
            return cls("meromorphic", _parse_complex(text.split(":", 1)[1]))
        return cls("explicit", _parse_complex(text))

    def describe(self) -> str:
        if self.kind in ("zero", "constant", "constant-"):
            return self.kind
        if self.kind == "meromorphic":
            return f"meromorphic:{self.parameter}"
        return f"explicit:{self.parameter}"

    @property
    def periodic(self) -> bool:
        """Whether the induced mu field is constant (so grid-periodic)."""
        return self.kind != "meromorphic"

    def mu_jet(self, data: InvariantData, blowup: float = 1e8) -> Jet:
        if self.kind == "zero":
            return Jet.constant(0.0, order=4)
        if self.kind in ("constant", "constant-"):
            plus, minus = riccati_constant(data.s)
            return Jet.constant(plus if self.kind == "constant" else minus, order=4)
        if self.kind == "explicit":
            return Jet.constant(self.parameter, order=4)
        u, v = data.point
        z = complex(u, v)
        delta = z - self.parameter
        if abs(delta) < 2.0 / blowup:
            raise RiccatiBlowupError(
                f"meromorphic mu has its pole at distance {abs(delta):.3e} from the point"
            )
        derivs = [
            -2.0 * (-1.0) ** k * math.factorial(k) * delta ** (-k - 1) for k in range(5)
        ]
        return jets.from_holomorphic_taylor(derivs, order=4)


# -- lift data ---------------------------------------------------------------


@dataclass
class LLiftData:
    mu: Jet
    Yhat: JetVector
    theta: Jet
    rho: Jet
    L: JetVector
    LL: complex
    theta_wedge: complex
    rho_wedge: complex
    conformal_factor: float
    dual_degenerate: bool
    dual_position: np.ndarray | None
    mu_desc: str = ""


def hat_lift(data: InvariantData, mu: Jet) -> JetVector:
    """Yhat = N + conj(mu) Y_z + mu Y_zbar + |mu|^2/2 Y."""
    mu_bar = jets.conj(mu)
    out = data.N + data.Y_z * mu_bar + data.Y_zbar * mu
    return out + data.Y * (0.5 * mu * mu_bar)


def theta_rho_L(
    data: InvariantData, mu: Jet, tol: Tolerances = DEFAULT, mu_desc: str = ""
) -> LLiftData:
    """Assemble the lift quantities and their wedge-pairing cross-checks."""
    mu_bar = jets.conj(mu)
    theta = jets.d_z(mu) - 0.5 * mu * mu - data.s
    rho = jets.d_z(mu_bar) - 2.0 * data.kappa_norm2
    L = normal_derivative(data.kappa, data, "zbar", check=False) * 2.0 + data.kappa * mu_bar
    ll = inner(L, L).value

    yhat = hat_lift(data, mu)
    yhat_z = jets.d_z(yhat)
    theta_w = -2.0 * wedge_inner(data.Y, data.Y_z, yhat, yhat_z).value
    rho_w = -2.0 * wedge_inner(data.Y, data.Y_zbar, yhat, yhat_z).value

    time = yhat.value[0].real
    if abs(time) < tol.degenerate_dual:
        degenerate = True
        position = None
    else:
        time_jet = yhat.component(0)
        proj = [
            (yhat.component(i) / time_jet) for i in range(1, data.dim)
        ]
        du = math.fsum(abs(p.coeff(1, 0)) ** 2 for p in proj) ** 0.5
        dv = math.fsum(abs(p.coeff(0, 1)) ** 2 for p in proj) ** 0.5
        degenerate = max(du, dv) < tol.degenerate_dual
        position = np.array([p.value for p in proj])

    return LLiftData(
        mu=mu,
        Yhat=yhat,
        theta=theta,
        rho=rho,
        L=L,
        LL=complex(ll),
        theta_wedge=complex(theta_w),
        rho_wedge=complex(rho_w),
        conformal_factor=float(2.0 * rho.value.real),
        dual_degenerate=degenerate,
        dual_position=position,
        mu_desc=mu_desc,
    )


def build_lift(
    chart_data: InvariantData, mu_spec: MuSpec, tol: Tolerances = DEFAULT
) -> LLiftData:
    mu = mu_spec.mu_jet(chart_data, blowup=tol.riccati_blowup)
    return theta_rho_L(chart_data, mu, tol, mu_desc=mu_spec.describe())


# -- isotropy quadratic ------------------------------------------------------


@dataclass
class IsotropicRoot:
    mu: complex
    theta_constant: complex  # Riccati residual if mu were locally constant
    quadratic_residual: float


@dataclass
class IsotropicCandidates:
    status: str  # quadratic | linear | degenerate
    roots: list = field(default_factory=list)


def isotropic_mu_candidates(data: InvariantData, tol: Tolerances = DEFAULT) -> IsotropicCandidates:
    """Solve <L, L> = 0 as a pointwise quadratic in conj(mu).

    The quadratic is ``mb^2 <kappa,kappa> + 4 mb <Dk,kappa> + 4 <Dk,Dk> = 0``
    with Dk = D_zbar kappa.  Umbilic-degenerate cases downgrade to a linear
    equation or a vacuous one (reported with a warning, not an error).  Each
    root also reports the Riccati residual theta it would have as a constant;
    an adjoint lift needs both to vanish.
    """
    dk = normal_derivative(data.kappa, data, "zbar", check=False)
    a = inner(data.kappa, data.kappa).value
    b = 4.0 * inner(dk, data.kappa).value
    c = 4.0 * inner(dk, dk).value
    # coefficients are quadratic in (kappa, D kappa); the canonical lift fixes
    # their natural unit, so degeneracy is judged on that absolute scale
    scale = max(
        abs(a), abs(b), abs(c),
        norm_hermitian(data.kappa.value) ** 2,
        1.0,
    )

    def pack(root):
        mu = np.conj(root)
        theta_const = -0.5 * mu * mu - data.s.value
        residual = abs(a * root * root + b * root + c) / scale
        return IsotropicRoot(complex(mu), complex(theta_const), float(residual))

    if abs(a) <= tol.isotropic * scale:
        if abs(b) <= tol.isotropic * scale:
            warnings.warn(
                "isotropy quadratic is vacuous (kappa isotropic or umbilic); "
                "every mu gives <L,L> = 0" if abs(c) <= tol.isotropic * scale
                else "isotropy quadratic is inconsistent (degenerate kappa)",
                stacklevel=2,
            )
            return IsotropicCandidates(status="degenerate")
        return IsotropicCandidates(status="linear", roots=[pack(-c / b)])
    disc = b * b - 4.0 * a * c
    sq = complex(np.sqrt(complex(disc)))
    roots = [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)]
    return IsotropicCandidates(status="quadratic", roots=[pack(r) for r in roots])


# -- classification ----------------------------------------------------------


@dataclass
class Classification:
    willmore: bool
    s_willmore: bool
    isotropic: bool
    s_isotropic: bool
    conformal_lift: bool
    umbilic: bool
    dual_degenerate: bool
    diagnostics: dict


def classify(data: InvariantData, lift: LLiftData, tol: Tolerances = DEFAULT) -> Classification:
    """Pointwise classification flags mirroring the lift taxonomy."""
    res_norm = norm_hermitian(willmore_residual(data))
    willmore = res_norm < tol.willmore

    dk = normal_derivative(data.kappa, data, "zbar", check=False)
    nk = norm_hermitian(data.kappa.value)
    nd = norm_hermitian(dk.value)
    h_cross = inner(data.kappa, jets.conj(dk)).value
    wedge2 = max(nk * nk * nd * nd - abs(h_cross) ** 2, 0.0)
    parallel_defect = wedge2 ** 0.5 / (nk * nd + tol.parallel_eps)
    s_willmore = willmore and parallel_defect < tol.parallel

    isotropic = abs(lift.LL) < tol.isotropic
    s_isotropic = norm_hermitian(lift.L.value) < tol.isotropic
    conformal = abs(lift.theta.value) < tol.conformal_lift

    return Classification(
        willmore=willmore,
        s_willmore=s_willmore,
        isotropic=isotropic,
        s_isotropic=s_isotropic,
        conformal_lift=conformal,
        umbilic=data.umbilic,
        dual_degenerate=lift.dual_degenerate,
        diagnostics={
            "willmore_residual_norm": res_norm,
            "parallel_defect": float(parallel_defect),
            "LL": lift.LL,
            "L_norm": norm_hermitian(lift.L.value),
            "theta": lift.theta.value,
        },
    )


# -- identities used by the equivalence tests --------------------------------


def harmonicity_identity(data: InvariantData, lift: LLiftData):
    """(2 D_zbar L - conj(mu) L, 2(2 D_zbar D_zbar kappa + conj(s) kappa)).

    The two sides agree for any mu solving the Riccati equation; the common
    value vanishing is the Willmore condition.
    """
    mu_bar = jets.conj(lift.mu)
    lhs = 2.0 * normal_derivative(lift.L, data, "zbar", check=False).value - (
        mu_bar.value * lift.L.value
    )
    d1 = normal_derivative(data.kappa, data, "zbar", check=False)
    d2 = normal_derivative(d1, data, "zbar", check=False)
    rhs = 2.0 * (2.0 * d2.value + np.conj(data.s.value) * data.kappa.value)
    return lhs, rhs


def rho_identity_residual(data: InvariantData, lift: LLiftData) -> complex:
    """rho_zbar - conj(mu) rho - 2 <L, conj(kappa)>; zero on Willmore data."""
    rho_zb = jets.d_zbar(lift.rho).value
    mu_bar = jets.conj(lift.mu).value
    cross = inner(lift.L, jets.conj(data.kappa)).value
    return rho_zb - mu_bar * lift.rho.value - 2.0 * cross
