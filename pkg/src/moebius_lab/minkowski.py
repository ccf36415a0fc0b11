"""Signature-(1, n+1) linear algebra on R^{n+1,1} and its complexification.

Vectors are plain numpy arrays of length n+2 with coordinate 0 timelike; the
form is ``<a, b> = -a_0 b_0 + sum_{j>=1} a_j b_j``.  Complex inputs use the
complex *bilinear* extension (no conjugation).  ``inner`` and ``wedge_inner``
also accept :class:`~moebius_lab.jets.JetVector` operands, returning jets.

All functions are pure; nothing here holds state.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import _backend
from ._prng import SplitMix64
from .errors import DegenerateInputError
from .jets import Jet, JetVector


_ETA_CACHE: dict = {}
_SIGN_CACHE: dict = {}


def eta(dim: int) -> np.ndarray:
    """Metric matrix diag(-1, 1, ..., 1) of size dim."""
    if dim not in _ETA_CACHE:
        e = np.eye(dim)
        e[0, 0] = -1.0
        e.setflags(write=False)
        _ETA_CACHE[dim] = e
    return _ETA_CACHE[dim]


def metric_signs(dim: int) -> np.ndarray:
    if dim not in _SIGN_CACHE:
        s = np.ones(dim)
        s[0] = -1.0
        s.setflags(write=False)
        _SIGN_CACHE[dim] = s
    return _SIGN_CACHE[dim]


def inner(a, b):
    """Bilinear pairing; symmetric, no conjugation on complex input."""
    if isinstance(a, JetVector) or isinstance(b, JetVector):
        if a.dim != b.dim:
            raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
        order = min(a.order, b.order)
        return Jet(_backend.pair(a.a, b.a, metric_signs(a.dim), order), order)
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return -a[0] * b[0] + np.dot(a[1:], b[1:])


def wedge_inner(a, b, c, d):
    """Pairing of decomposable 2-vectors: <a,c><b,d> - <a,d><b,c>."""
    return inner(a, c) * inner(b, d) - inner(a, d) * inner(b, c)


def norm2_hermitian(a):
    """Positive norm square <a, conj(a)> of a complex vector (value level)."""
    a = np.asarray(a)
    return float(np.real(inner(a, np.conj(a))))


def norm_hermitian(a):
    """sqrt of the Hermitian norm square, clamped against rounding dust."""
    return max(norm2_hermitian(a), 0.0) ** 0.5


def is_forward_null(v, tol: float = 1e-10) -> bool:
    v = np.asarray(v)
    scale = 1.0 + float(np.max(np.abs(v))) ** 2
    return abs(inner(v, v)) <= tol * scale and v[0].real > 0.0


def gram_schmidt_lorentz(vectors, rank_tol: float = 1e-9):
    """Orthonormalize w.r.t. the indefinite form; returns (basis, signs).

    Pivoting picks, at each step, the remaining vector with the largest
    |<v, v>| after projection (ties prefer timelike, then input order), which
    keeps pivots away from the null cone.  When every remaining vector is
    itself null but a cross pairing survives (a hyperbolic pair, e.g. a lift
    and its conjugate null partner), the pair is rotated to (v+w, v-w) before
    pivoting.  Each pivot is normalized by sqrt(|<v, v>|) and its sign
    recorded, so the output Gram matrix is diag(signs).  Raises
    :class:`DegenerateInputError` when neither a pivot nor a hyperbolic pair
    clears ``rank_tol`` relative to the input scale.
    """
    work = [np.array(v, dtype=float) for v in vectors]
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in work) ** 2)
    basis = []
    signs = []
    remaining = list(range(len(work)))
    while remaining:
        norms = [inner(work[i], work[i]) for i in remaining]
        best = max(
            range(len(remaining)),
            key=lambda k: (abs(norms[k]), -np.sign(norms[k]), -remaining[k]),
        )
        q = norms[best]
        if abs(q) <= rank_tol * scale:
            rotated = False
            for ka in range(len(remaining)):
                for kb in range(ka + 1, len(remaining)):
                    a, b = remaining[ka], remaining[kb]
                    if abs(inner(work[a], work[b])) > rank_tol * scale:
                        work[a], work[b] = work[a] + work[b], work[a] - work[b]
                        rotated = True
                        break
                if rotated:
                    break
            if rotated:
                continue
            raise DegenerateInputError(
                f"gram_schmidt_lorentz: pivot norm {q:.3e} below tolerance "
                f"(rank-deficient or null-degenerate input)"
            )
        v = work[remaining[best]]
        sign = 1.0 if q > 0 else -1.0
        e = v / np.sqrt(abs(q))
        del remaining[best]
        for i in remaining:
            work[i] = work[i] - sign * inner(work[i], e) * e
        basis.append(e)
        signs.append(sign)
    return basis, tuple(int(s) for s in signs)


@dataclass(frozen=True)
class MobiusTransform:
    """Element of the identity component of the (1, n+1) orthogonal group."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v):
        if isinstance(v, JetVector):
            return v.matmul(self.matrix)
        return self.matrix @ np.asarray(v)

    def inverse(self) -> "MobiusTransform":
        e = eta(self.dim)
        return MobiusTransform(e @ self.matrix.T @ e)

    def defect(self) -> float:
        """Max-norm of M^T eta M - eta (0 for an exact isometry)."""
        e = eta(self.dim)
        return float(np.max(np.abs(self.matrix.T @ e @ self.matrix - e)))

    def validate(self, tol: float = 1e-10) -> None:
        if self.defect() > tol:
            raise ValueError("matrix does not preserve the indefinite form")
        if np.linalg.det(self.matrix) < 0 or self.matrix[0, 0] <= 0:
            raise ValueError("matrix is not in the identity component")


def exp_lorentz(x: np.ndarray) -> MobiusTransform:
    """Exponential of a Lie-algebra element (X^T eta + eta X = 0)."""
    return MobiusTransform(expm(np.asarray(x, dtype=float)))


def random_algebra_element(seed: int, n: int) -> np.ndarray:
    """Pseudo-random element of the isometry algebra with norm <= 1.

    Uses SplitMix64 (see :mod:`moebius_lab._prng`) so that a given seed yields
    the same transform everywhere.  X = eta K with K skew-symmetric and
    uniform entries, rescaled to Frobenius norm <= 1.
    """
    dim = n + 2
    rng = SplitMix64(seed)
    k = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            k[i, j] = rng.uniform(-1.0, 1.0)
            k[j, i] = -k[i, j]
    x = eta(dim) @ k
    fro = float(np.linalg.norm(x))
    if fro > 1.0:
        x = x / fro
    return x


def random_mobius(seed: int, n: int) -> MobiusTransform:
    """Reproducible random transform in the identity component."""
    m = exp_lorentz(random_algebra_element(seed, n))
    m.validate(tol=1e-12)
    return m
