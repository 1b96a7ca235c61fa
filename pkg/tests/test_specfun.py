import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrd_spectra import specfun as sf
from lrd_spectra.errors import DivergenceError, DomainError, GammaOverflowError, PoleError


def test_gamma_values():
    assert sf.gamma(1) == pytest.approx(1.0, abs=1e-15)
    assert sf.gamma(1.5) == pytest.approx(0.8862269254527580, rel=1e-14)
    assert sf.gamma(4.5) / sf.gamma(3.5) == pytest.approx(3.5, rel=1e-14)


@pytest.mark.parametrize("x", [0, -1, -7])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        sf.gamma(x)


def test_gamma_overflow():
    with pytest.raises(GammaOverflowError):
        sf.gamma(200.0)


def test_gamma_rejects_nan():
    with pytest.raises(DomainError):
        sf.gamma(float("nan"))


def test_upper_incomplete_gamma():
    z = np.array([0.0, 0.5, 3.0])
    np.testing.assert_allclose(sf.upper_incomplete_gamma(1, z), np.exp(-z), rtol=1e-14)
    assert sf.upper_incomplete_gamma(4, 0) == pytest.approx(6.0, rel=1e-14)
    # mpmath oracle, 30 digits
    assert sf.upper_incomplete_gamma(4, 2) == pytest.approx(5.14274076299128229, rel=1e-12)
    for c in (1, 2.5, 4):
        assert sf.upper_incomplete_gamma(c, 0) == pytest.approx(math.gamma(c), rel=1e-14)
    with pytest.raises(DomainError):
        sf.upper_incomplete_gamma(0, 1.0)


def test_bessel_j_half_integer():
    assert sf.bessel_j(0, 0) == 1.0
    for z in (0.5, 1.0, 10.0):
        assert sf.bessel_j(0.5, z) == pytest.approx(math.sqrt(2 / (math.pi * z)) * math.sin(z), abs=1e-14)
        j52 = math.sqrt(2 / (math.pi * z)) * ((3 / z**2 - 1) * math.sin(z) - 3 * math.cos(z) / z)
        assert sf.bessel_j(2.5, z) == pytest.approx(j52, abs=1e-13)


@given(st.floats(0.0, 3.0), st.floats(0.0, 1e3))
def test_bessel_j_bounded(nu, z):
    assert abs(sf.bessel_j(nu, z)) <= 1.0 + 1e-15


@given(st.floats(0.5, 6.0), st.floats(0.1, 200.0))
def test_bessel_recurrence(nu, z):
    res = sf.bessel_j(nu - 1, z) + sf.bessel_j(nu + 1, z) - 2 * nu / z * sf.bessel_j(nu, z)
    assert abs(res) <= 1e-9


def test_spherical_kernel():
    for n in range(1, 10):
        assert sf.spherical_bessel_Y(n, 0.0) == 1.0
    z = np.linspace(0.1, 30, 50)
    np.testing.assert_allclose(sf.spherical_bessel_Y(3, z), np.sin(z) / z, atol=1e-14)
    assert sf.spherical_bessel_Y(1, math.pi) == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5, 9])
def test_spherical_kernel_small_argument(n):
    h = 1e-3
    # Y_n(h) = 1 - h^2/(2n) + O(h^4)
    assert abs(sf.spherical_bessel_Y(n, h) - (1 - h * h / (2 * n))) < 1e-12


@given(st.integers(1, 9), st.floats(0.0, 500.0))
def test_spherical_kernel_bounded(n, z):
    assert abs(sf.spherical_bessel_Y(n, z)) <= 1.0 + 1e-14


def test_bessel_k():
    z = np.geomspace(1e-4, 50, 40)
    np.testing.assert_allclose(sf.bessel_k(0.5, z), np.sqrt(np.pi / (2 * z)) * np.exp(-z), rtol=1e-12)
    assert sf.bessel_k(-1.3, 2.0) == pytest.approx(sf.bessel_k(1.3, 2.0), rel=1e-14)
    assert sf.bessel_k(1, 1e-6) * 1e-6 == pytest.approx(1.0, rel=1e-5)
    nu = 2.5
    assert 1e-5**nu * sf.bessel_k(nu, 1e-5) == pytest.approx(2 ** (nu - 1) * math.gamma(nu), rel=1e-8)
    with pytest.raises(DivergenceError):
        sf.bessel_k(1, 0.0)


def test_sine_cosine_integrals():
    assert sf.sine_integral(0.0) == 0.0
    for x in (10.0, 100.0, 1e3):
        assert abs(sf.sine_integral(x) - math.pi / 2) <= 2 / x
    # gamma + int_0^1 (cos t - 1)/t dt, mpmath quadrature oracle
    assert sf.cosine_integral(1.0) == pytest.approx(0.337403922900968135, abs=1e-12)
    with pytest.raises(DivergenceError):
        sf.cosine_integral(0.0)


def test_bessel_zeros():
    assert sf.bessel_j_zero(0, 1) == pytest.approx(2.404825557695773, abs=1e-12)
    for k in (1, 2, 10):
        assert sf.bessel_j_zero(0.5, k) == pytest.approx(k * math.pi, abs=1e-10)


@given(st.floats(0.0, 5.0), st.integers(1, 30))
def test_bessel_zero_is_root(nu, k):
    assert abs(sf.bessel_j(nu, sf.bessel_j_zero(nu, k))) < 1e-9


def test_normalized_bessel_at_zero():
    assert sf.normalized_bessel(1.5, 0.0) == 1.0
