import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moebius_lab import jets
from moebius_lab.errors import JetDomainError, UsageError
from moebius_lab.jets import Jet, JetVector


def test_product_of_coordinates():
    u = Jet.coordinate_u(0.0, 2)
    v = Jet.coordinate_v(0.0, 2)
    p = u * v
    assert p.coeff(1, 1) == pytest.approx(1.0)
    for i in range(3):
        for j in range(3 - i):
            if (i, j) != (1, 1):
                assert abs(p.coeff(i, j)) == 0.0


def test_sqrt_of_constant():
    assert jets.sqrt(Jet.constant(4.0)).value == pytest.approx(2.0)


def test_reciprocal_against_finite_differences():
    # independent oracle: central second difference of f(u) = 1/(1+u^2+v^2)
    h = 1e-4
    f = lambda u, v: 1.0 / (1.0 + u * u + v * v)
    fd = (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / h**2
    u = Jet.coordinate_u(0.0, 4)
    v = Jet.coordinate_v(0.0, 4)
    inv = 1.0 / (1.0 + u * u + v * v)
    assert inv.coeff(2, 0) == pytest.approx(fd, abs=1e-6)
    assert inv.coeff(2, 0) == pytest.approx(-2.0, abs=1e-12)


def test_sin_series_coefficients():
    s = jets.sin(Jet.coordinate_u(0.0, 3))
    assert s.coeff(1, 0) == pytest.approx(1.0)
    assert s.coeff(2, 0) == pytest.approx(0.0)
    # derivative-normalized: third mixed partial of sin at 0 is -1
    assert s.coeff(3, 0) == pytest.approx(-1.0)
    # plain Taylor view carries the 1/3!
    assert s.taylor(3, 0) == pytest.approx(-1.0 / 6.0)


def test_exp_of_zero():
    e = jets.exp(Jet.constant(0.0, 3))
    assert e.value == pytest.approx(1.0)
    assert abs(e.coeff(1, 0)) == 0.0


def test_cos_value_matches_math_library():
    c = jets.cos(Jet.coordinate_u(0.3, 4))
    assert c.value == pytest.approx(math.cos(0.3), abs=1e-15)
    assert c.coeff(1, 0) == pytest.approx(-math.sin(0.3), abs=1e-14)


def test_wirtinger_of_z_and_zbar():
    z = Jet.coordinate_u(0.2, 3) + 1j * Jet.coordinate_v(0.4, 3)
    assert jets.d_z(z).value == pytest.approx(1.0)
    assert abs(jets.d_zbar(z).value) < 1e-15


def test_laplacian_of_square_modulus():
    u = Jet.coordinate_u(0.2, 3)
    v = Jet.coordinate_v(0.4, 3)
    r2 = u * u + v * v
    assert jets.d_zbar(jets.d_z(r2)).value == pytest.approx(1.0)


def test_second_wirtinger_of_coscos():
    # d_z^2 of cos(u)cos(v) at 0: (f_uu - 2i f_uv - f_vv)/4 = (-1 - 0 + 1)/4 = 0
    f = jets.cos(Jet.coordinate_u(0.0, 4)) * jets.cos(Jet.coordinate_v(0.0, 4))
    assert abs(jets.d_z(jets.d_z(f)).value) < 1e-15


def test_wirtinger_requires_order():
    with pytest.raises(JetDomainError):
        jets.d_z(Jet.constant(1.0, 0))


def test_division_by_small_value_raises():
    tiny = Jet.constant(1e-16, 2)
    with pytest.raises(JetDomainError):
        _ = Jet.constant(1.0, 2) / tiny


def test_sqrt_domain():
    with pytest.raises(JetDomainError):
        jets.sqrt(Jet.constant(-1.0, 2))
    with pytest.raises(JetDomainError):
        jets.power(Jet.constant(-2.0, 2), 0.5)


def test_integer_power_of_negative_value_is_fine():
    p = jets.power(Jet.constant(-2.0, 2), 3)
    assert p.value == pytest.approx(-8.0)


@settings(deadline=None, max_examples=40)
@given(
    coeffs_a=st.lists(st.integers(min_value=-3, max_value=3), min_size=6, max_size=6),
    coeffs_b=st.lists(st.integers(min_value=-3, max_value=3), min_size=6, max_size=6),
)
def test_product_matches_symbolic_polynomial(coeffs_a, coeffs_b):
    """Jet products of degree-2 polynomials equal exact polynomial products."""

    def poly_table(c):
        t = np.zeros((6, 6), dtype=complex)
        t[0, 0], t[1, 0], t[0, 1], t[2, 0], t[1, 1], t[0, 2] = c
        return t

    ta, tb = poly_table(coeffs_a), poly_table(coeffs_b)
    prod = (Jet(ta, 4) * Jet(tb, 4)).c
    expected = np.zeros((8, 8), dtype=complex)
    for i in range(6):
        for j in range(6):
            for k in range(6):
                for l in range(6):
                    if ta[i, j] != 0 and tb[k, l] != 0:
                        expected[i + k, j + l] += ta[i, j] * tb[k, l]
    mask = np.add.outer(np.arange(6), np.arange(6)) <= 4
    assert np.allclose(prod[mask], expected[:6, :6][mask], atol=1e-12)


@settings(deadline=None, max_examples=30)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_conjugation_swaps_wirtinger_operators(u0, v0):
    f = jets.exp(Jet.coordinate_u(u0, 4) * 0.3) * jets.sin(
        Jet.coordinate_v(v0, 4) + 0.2
    )
    lhs = jets.d_z(jets.conj(f))
    rhs = jets.conj(jets.d_zbar(f))
    assert np.allclose(lhs.c, rhs.c, atol=1e-13)


# -- finite-difference builder ------------------------------------------------


def _stencil(fn, u0, v0, h, radius=2, dtype=np.longdouble):
    size = 2 * radius + 1
    out = np.empty((size, size), dtype=dtype)
    for i in range(size):
        for j in range(size):
            out[i, j] = fn(dtype(u0) + (i - radius) * dtype(h), dtype(v0) + (j - radius) * dtype(h))
    return out


def test_samples_of_linear_function():
    vals = _stencil(lambda u, v: u, 0.0, 0.0, 1e-3)
    jet = jets.jet_from_samples(vals, 1e-3, 4)
    assert jet.coeff(1, 0) == pytest.approx(1.0, abs=1e-9)
    assert abs(jet.coeff(0, 1)) < 1e-9


def test_samples_of_sine_against_analytic_jet():
    u0 = 0.3
    vals = _stencil(lambda u, v: np.sin(u), u0, 0.0, 1e-3)
    jet = jets.jet_from_samples(vals, 1e-3, 4)
    analytic = jets.sin(Jet.coordinate_u(u0, 4))
    assert jet.coeff(2, 0) == pytest.approx(-math.sin(u0), abs=1e-6)
    for i in range(5):
        assert jet.coeff(i, 0) == pytest.approx(analytic.coeff(i, 0), abs=1e-4)


def test_insufficient_stencil():
    vals = np.zeros((3, 3))
    with pytest.raises(UsageError):
        jets.jet_from_samples(vals, 1e-3, 4)


def test_fd_agreement_within_100_h_squared():
    h = 1e-3
    fn = lambda u, v: np.cos(u) * np.exp(0.3 * v)
    vals = _stencil(fn, 0.4, -0.2, h)
    jet = jets.jet_from_samples(vals, h, 4)
    analytic = jets.cos(Jet.coordinate_u(0.4, 4)) * jets.exp(
        Jet.coordinate_v(-0.2, 4) * 0.3
    )
    for i in range(5):
        for j in range(5 - i):
            assert abs(jet.coeff(i, j) - analytic.coeff(i, j)) < 100.0 * h * h


def test_vector_samples_build_jetvector():
    h = 1e-3
    size = 5
    vals = np.empty((size, size, 2), dtype=np.longdouble)
    for i in range(size):
        for j in range(size):
            u = (i - 2) * h
            v = (j - 2) * h
            vals[i, j] = (u + v, u * v)
    jv = jets.jet_from_samples(vals, h, 2)
    assert isinstance(jv, JetVector)
    assert jv.component(0).coeff(1, 0) == pytest.approx(1.0, abs=1e-9)
    assert jv.component(1).coeff(1, 1) == pytest.approx(1.0, abs=1e-6)


def test_holomorphic_taylor_roundtrip():
    # f(z) = z^2 at z0: derivatives [z0^2, 2 z0, 2, 0, 0]
    z0 = 0.3 + 0.5j
    jet = jets.from_holomorphic_taylor([z0 * z0, 2 * z0, 2.0, 0.0, 0.0], 4)
    direct = (Jet.coordinate_u(0.3, 4) + 1j * Jet.coordinate_v(0.5, 4)) ** 2
    assert np.allclose(jet.c, direct.c, atol=1e-14)
    assert abs(jets.d_zbar(jet).value) < 1e-14


def test_substitute_composes_bivariate():
    # f(u, v) = sin(u) * v composed with u = s^2, v = 2t about (s,t)=(0.6,0.2)
    s0, t0 = 0.6, 0.2
    u_in = Jet.coordinate_u(s0, 4) ** 2
    v_in = 2.0 * Jet.coordinate_v(t0, 4)
    f = jets.sin(Jet.coordinate_u(u_in.value.real, 4)) * Jet.coordinate_v(
        v_in.value.real, 4
    )
    composed = jets.substitute(f, u_in, v_in)
    direct = jets.sin(Jet.coordinate_u(s0, 4) ** 2) * (2.0 * Jet.coordinate_v(t0, 4))
    assert np.allclose(composed.c, direct.c, atol=1e-12)
