"""
Special functions used throughout the package.

Thin, validated wrappers over :mod:`scipy.special` plus the pieces scipy does
not expose directly: the normalised spherical Bessel kernel ``Y_n`` of
isotropic covariance theory and zeros of ``J_nu`` for real order.

All functions accept scalars or array-likes and return a float for scalar
input, an ``ndarray`` otherwise.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

from .errors import DivergenceError, DomainError, GammaOverflowError, PoleError

__all__ = [
    "gamma",
    "upper_incomplete_gamma",
    "bessel_j",
    "bessel_y",
    "bessel_k",
    "normalized_bessel",
    "spherical_bessel_Y",
    "sine_integral",
    "cosine_integral",
    "bessel_j_zero",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.57721566490153286061


def _arr(x, name="x"):
    a = np.asarray(x, dtype=float)
    if np.isnan(a).any():
        raise DomainError(f"{name} must not be NaN")
    return a


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def gamma(x):
    """
    Euler gamma function.

    Raises
    ------
    PoleError
        At non-positive integers.
    GammaOverflowError
        When the result is not representable (x > ~171.6).
    """
    a = _arr(x)
    if np.any((a <= 0) & (a == np.floor(a))):
        raise PoleError("gamma has poles at non-positive integers")
    v = sp.gamma(a)
    if np.any(np.isinf(v)):
        raise GammaOverflowError("gamma(x) overflows double precision")
    return _out(v)


def upper_incomplete_gamma(c, z):
    r"""Upper incomplete gamma :math:`\Gamma(c,z)=\int_z^\infty e^{-t}t^{c-1}dt`, c > 0."""
    c = _arr(c, "c")
    z = _arr(z, "z")
    if np.any(c <= 0):
        raise DomainError("upper_incomplete_gamma requires c > 0")
    if np.any(z < 0):
        raise DomainError("upper_incomplete_gamma requires z >= 0")
    return _out(sp.gammaincc(c, z) * sp.gamma(c))


def bessel_j(nu, z):
    """Bessel function of the first kind ``J_nu(z)`` for nu >= -1/2, z >= 0."""
    nu = _arr(nu, "nu")
    z = _arr(z, "z")
    if np.any(nu < -0.5):
        raise DomainError("bessel_j supports nu >= -1/2")
    if np.any(z < 0):
        raise DomainError("bessel_j supports z >= 0")
    return _out(sp.jv(nu, z))


def bessel_y(nu, z):
    """Bessel function of the second kind ``Y_nu(z)``, z > 0 (tail asymptotics only)."""
    z = _arr(z, "z")
    if np.any(z <= 0):
        raise DivergenceError("Y_nu diverges at z = 0")
    return _out(sp.yv(nu, z))


def bessel_k(nu, z):
    """Modified Bessel function of the second kind ``K_nu(z)``, z > 0."""
    nu = _arr(nu, "nu")
    z = _arr(z, "z")
    if np.any(z < 0):
        raise DomainError("bessel_k requires z > 0")
    if np.any(z == 0):
        raise DivergenceError("K_nu diverges at z = 0")
    return _out(sp.kv(nu, z))


def normalized_bessel(nu, z):
    r"""
    Entire kernel :math:`\Lambda_\nu(z)=\Gamma(\nu+1)(2/z)^\nu J_\nu(z)`.

    Equals 1 at z = 0. ``Lambda_{(n-2)/2}`` is the isotropic kernel ``Y_n``
    for every n >= 1 (including ``Y_1 = cos``).
    """
    nu = float(nu)
    z = _arr(z, "z")
    zz = np.abs(z)
    out = np.empty_like(zz)
    small = zz < 1e-4
    if np.any(small):
        s = zz[small] ** 2 / 4.0
        # two terms of the power series suffice below 1e-4
        out[small] = 1.0 - s / (nu + 1.0) + s * s / (2.0 * (nu + 1.0) * (nu + 2.0))
    big = ~small
    if np.any(big):
        zb = zz[big]
        if nu == -0.5:
            out[big] = np.cos(zb)
        elif nu == 0.5:
            out[big] = np.sin(zb) / zb
        else:
            out[big] = sp.gamma(nu + 1.0) * np.exp(nu * np.log(2.0 / zb)) * sp.jv(nu, zb)
    return _out(out)


def spherical_bessel_Y(n, z):
    r"""
    Isotropic covariance kernel ``Y_n``.

    ``Y_1(z) = cos z`` and ``Y_n(z) = 2^{(n-2)/2} Gamma(n/2) J_{(n-2)/2}(z) z^{(2-n)/2}``
    for n >= 2, continued by 1 at z = 0.
    """
    if int(n) != n or n < 1:
        raise DomainError("spherical_bessel_Y requires an integer n >= 1")
    return normalized_bessel((n - 2) / 2.0, z)


def sine_integral(x):
    """Sine integral ``Si(x)``, x >= 0."""
    x = _arr(x)
    if np.any(x < 0):
        raise DomainError("sine_integral is defined here for x >= 0")
    return _out(sp.sici(x)[0])


def cosine_integral(x):
    """Cosine integral ``Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt``, x > 0."""
    x = _arr(x)
    if np.any(x < 0):
        raise DomainError("cosine_integral requires x > 0")
    if np.any(x == 0):
        raise DivergenceError("Ci diverges logarithmically at 0")
    return _out(sp.sici(x)[1])


def _mcmahon(nu, k):
    # k-th zero of J_nu, large-k expansion
    mu = 4.0 * nu * nu
    b = (k + 0.5 * nu - 0.25) * math.pi
    b8 = 8.0 * b
    return (
        b
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8**3)
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8**5)
    )


def _first_zero_guess(nu):
    if nu <= 1.0:
        return _mcmahon(nu, 1)
    c = nu ** (1.0 / 3.0)
    return nu + 1.8557571 * c + 1.033150 / c - 0.00397 / nu - 0.0908 / c**5 + 0.043 / c**7


def bessel_j_zero(nu, k):
    """
    k-th positive zero of ``J_nu`` (k >= 1), accurate to ~1e-13.

    McMahon's expansion (Olver's uniform guess for the first zero of higher
    orders) refined by Newton's method. ``k`` may be an integer array.
    """
    nu = float(nu)
    if nu < -0.5:
        raise DomainError("bessel_j_zero supports nu >= -1/2")
    kk = np.atleast_1d(np.asarray(k))
    if np.any(kk < 1) or np.any(kk != np.floor(kk)):
        raise DomainError("k must be a positive integer")
    kk = kk.astype(float)
    if nu in (-0.5, 0.5):
        # zeros of cos and sin are exact
        z = (kk - 0.5) * math.pi if nu == -0.5 else kk * math.pi
        return float(z[0]) if np.ndim(k) == 0 else z
    z = _mcmahon(nu, kk)
    z[kk == 1] = _first_zero_guess(nu)
    for _ in range(50):
        j = sp.jv(nu, z)
        dj = nu / z * j - sp.jv(nu + 1.0, z)
        step = j / dj
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * z):
            break
    return float(z[0]) if np.ndim(k) == 0 else z
