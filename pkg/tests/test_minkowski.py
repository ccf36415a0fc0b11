import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moebius_lab import minkowski
from moebius_lab._prng import SplitMix64
from moebius_lab.errors import DegenerateInputError

E5 = [np.eye(5)[i] for i in range(5)]


def test_null_vector_on_cone():
    v = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
    assert minkowski.inner(v, v) == pytest.approx(0.0)
    assert minkowski.is_forward_null(v)


def test_timelike_unit():
    v = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    assert minkowski.inner(v, v) == pytest.approx(-1.0)


def test_bilinear_extension_no_conjugation():
    v = np.array([0.0, 1j, 0.0, 0.0, 0.0])
    assert minkowski.inner(v, v) == pytest.approx(-1.0)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        minkowski.inner(np.zeros(5), np.zeros(6))


def test_wedge_inner_basis_pair():
    a = np.array([1.0, 0, 0, 0, 0])
    b = np.array([0.0, 1.0, 0, 0, 0])
    assert minkowski.wedge_inner(a, b, a, b) == pytest.approx(-1.0)


def test_wedge_inner_degenerate_pair():
    rng = SplitMix64(7)
    a = np.array([rng.uniform(-1, 1) for _ in range(5)])
    c = np.array([rng.uniform(-1, 1) for _ in range(5)])
    d = np.array([rng.uniform(-1, 1) for _ in range(5)])
    assert minkowski.wedge_inner(a, a, c, d) == pytest.approx(0.0, abs=1e-14)


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=2**32))
def test_wedge_antisymmetry_and_pair_swap(seed):
    rng = SplitMix64(seed)
    vecs = [np.array([rng.uniform(-1, 1) for _ in range(5)]) for _ in range(4)]
    a, b, c, d = vecs
    w = minkowski.wedge_inner
    assert w(a, b, c, d) + w(b, a, c, d) == pytest.approx(0.0, abs=1e-13)
    assert w(a, b, c, d) + w(a, b, d, c) == pytest.approx(0.0, abs=1e-13)
    assert w(a, b, c, d) == pytest.approx(w(c, d, a, b), abs=1e-13)


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=2**32))
def test_inner_symmetry_and_hermitian_split(seed):
    rng = SplitMix64(seed)
    a = np.array([rng.complex_uniform() for _ in range(5)])
    b = np.array([rng.complex_uniform() for _ in range(5)])
    assert minkowski.inner(a, b) == pytest.approx(minkowski.inner(b, a))
    # <a, conj a> = |Re a|^2_eta + |Im a|^2_eta
    lhs = minkowski.inner(a, np.conj(a))
    rhs = minkowski.inner(a.real, a.real) + minkowski.inner(a.imag, a.imag)
    assert lhs == pytest.approx(rhs, abs=1e-13)


# -- indefinite Gram-Schmidt ---------------------------------------------------


def test_gram_schmidt_standard_basis():
    basis, signs = minkowski.gram_schmidt_lorentz(E5)
    assert signs == (-1, 1, 1, 1, 1)
    for vec, unit in zip(E5, basis):
        assert np.allclose(vec, unit)


def test_gram_schmidt_repeated_vector_degenerate():
    with pytest.raises(DegenerateInputError):
        minkowski.gram_schmidt_lorentz([E5[0], E5[0]])


def test_gram_schmidt_null_pair():
    # two null vectors spanning a Lorentzian plane: needs the hyperbolic rotation
    a = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
    b = np.array([1.0, -1.0, 0.0, 0.0, 0.0])
    basis, signs = minkowski.gram_schmidt_lorentz([a, b])
    assert sorted(signs) == [-1, 1]
    gram = np.array([[minkowski.inner(x, y) for y in basis] for x in basis])
    assert np.allclose(gram, np.diag(signs), atol=1e-12)


def test_gram_schmidt_output_gram_matrix():
    rng = SplitMix64(11)
    vecs = [np.array([rng.uniform(-1, 1) for _ in range(5)]) for _ in range(4)]
    basis, signs = minkowski.gram_schmidt_lorentz(vecs)
    gram = np.array([[minkowski.inner(x, y) for y in basis] for x in basis])
    assert np.allclose(gram, np.diag(signs), atol=1e-10)
    # spans agree
    stacked = np.vstack([vecs, basis])
    assert np.linalg.matrix_rank(stacked, tol=1e-10) == 4


# -- transforms ----------------------------------------------------------------


def test_random_mobius_defining_property():
    m = minkowski.random_mobius(0, 3)
    assert m.defect() < 1e-12
    assert np.linalg.det(m.matrix) == pytest.approx(1.0, abs=1e-12)
    assert m.matrix[0, 0] > 0


def test_exp_of_zero_is_identity():
    m = minkowski.exp_lorentz(np.zeros((5, 5)))
    assert np.allclose(m.matrix, np.eye(5))


def test_mobius_preserves_forward_cone():
    m = minkowski.random_mobius(1, 3)
    v = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
    w = m.apply(v)
    assert abs(minkowski.inner(w, w)) < 1e-12
    assert w[0] > 0


def test_mobius_preserves_inner_products():
    rng = SplitMix64(3)
    for seed in range(5):
        m = minkowski.random_mobius(seed, 3)
        v = np.array([rng.uniform(-1, 1) for _ in range(5)])
        w = np.array([rng.uniform(-1, 1) for _ in range(5)])
        assert minkowski.inner(m.apply(v), m.apply(w)) == pytest.approx(
            minkowski.inner(v, w), abs=1e-10
        )


def test_mobius_inverse():
    m = minkowski.random_mobius(5, 4)
    assert np.allclose(m.matrix @ m.inverse().matrix, np.eye(6), atol=1e-12)


def test_mobius_validate_rejects_time_reversal():
    flip = np.diag([-1.0, -1.0, 1.0, 1.0, 1.0])
    bad = minkowski.MobiusTransform(flip)
    assert bad.defect() < 1e-15  # it is an isometry ...
    with pytest.raises(ValueError):  # ... but not in the identity component
        bad.validate()


def test_splitmix_reference_sequence():
    # frozen regression of the documented generator (seed 0, first outputs)
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert rng.next_u64() == 0x06C45D188009454F
