"""
Variances of ball and sphere averages of an isotropic field.

For ``eta(r) = int_{v(r)} xi(x) dx`` and ``zeta(r) = int_{s(r)} xi(x) dm(x)``

    b_n(r) = (2 pi)^n r^{2n}     int J_{n/2}^2(lambda r) (lambda r)^{-n} dG,
    l_n(r) = (2 pi)^n r^{2(n-1)} int J_{(n-2)/2}^2(lambda r) (lambda r)^{2-n} dG.

The spectral integrals use the product-kernel path of the quadrature engine.
:func:`var_ball_bruteforce` and :func:`var_sphere_bruteforce` estimate the
defining double integrals by Monte Carlo and serve as independent oracles.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NonConvergenceWarning
from .quadrature import BesselKernel, QuadResult
from .spectra import CovarianceModel, SpectralMeasure

__all__ = [
    "ball_volume",
    "sphere_area",
    "ball_kernel",
    "sphere_kernel",
    "var_ball",
    "var_sphere",
    "var_ball_scaled",
    "var_ball_bruteforce",
    "var_sphere_bruteforce",
]

_TINY = 1e-290


def ball_volume(n, r=1.0):
    """Volume of the n-ball of radius ``r``."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r**n


def sphere_area(n, r=1.0):
    """Surface measure of the sphere of radius ``r`` in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2) * r ** (n - 1)


def ball_kernel(n):
    """``(2 pi)^n J_{n/2}^2(z) z^{-n}`` as a product kernel (without ``r^{2n}``)."""
    nu = n / 2.0
    c = (2 * math.pi) ** n / (2.0**nu * math.gamma(nu + 1)) ** 2
    return BesselKernel(nu, nu, 0.0, c)


def sphere_kernel(n):
    """``(2 pi)^n J_{(n-2)/2}^2(z) z^{2-n}`` as a product kernel (without ``r^{2(n-1)}``)."""
    if n < 2:
        raise DomainError("sphere averages need n >= 2")
    nu = (n - 2) / 2.0
    c = (2 * math.pi) ** n / (2.0**nu * math.gamma(nu + 1)) ** 2
    return BesselKernel(nu, nu, 0.0, c)


def _spectral_variance(m, kernel, r, scale, rtol, full_output):
    if r <= 0:
        raise DomainError("r must be positive")
    res = m.integrate(kernel, r, tol=_TINY, rtol=rtol, max_panels=400)
    if not res.converged:
        import warnings

        warnings.warn(f"variance integral not converged at r={r:g}", NonConvergenceWarning,
                      stacklevel=3)
    out = QuadResult(res.value * scale, res.error * scale, res.converged, res.panels, res.divergent)
    return out if full_output else out.value


def var_ball(m: SpectralMeasure, r, rtol=1e-10, full_output=False):
    """
    Variance ``b_n(r)`` of the integral of the field over the ball of radius ``r``.

    Examples
    --------
    A single atom at the origin gives a constant field, so ``b_n`` is the
    squared volume:

    >>> m = SpectralMeasure.from_atoms(3, [(0.0, 1.0)])
    >>> round(var_ball(m, 1.0) / ball_volume(3) ** 2, 12)
    1.0
    """
    if np.ndim(r):
        return np.array([var_ball(m, x, rtol) for x in np.asarray(r, dtype=float)])
    r = float(r)
    return _spectral_variance(m, ball_kernel(m.n), r, r ** (2 * m.n), rtol, full_output)


def var_ball_scaled(m: SpectralMeasure, r, rtol=1e-10):
    """``b_n(r) / r^{2n}``, computed without forming ``r^{2n}``."""
    if np.ndim(r):
        return np.array([var_ball_scaled(m, x, rtol) for x in np.asarray(r, dtype=float)])
    return _spectral_variance(m, ball_kernel(m.n), float(r), 1.0, rtol, False)


def var_sphere(m: SpectralMeasure, r, rtol=1e-10, full_output=False):
    """Variance ``l_n(r)`` of the integral of the field over the sphere of radius ``r`` (n >= 2)."""
    if m.n < 2:
        raise DomainError("var_sphere requires n >= 2")
    if np.ndim(r):
        return np.array([var_sphere(m, x, rtol) for x in np.asarray(r, dtype=float)])
    r = float(r)
    return _spectral_variance(m, sphere_kernel(m.n), r, r ** (2 * (m.n - 1)), rtol, full_output)


def _uniform_ball(rng, size, n, r):
    x = rng.standard_normal((size, n))
    x /= np.linalg.norm(x, axis=1)[:, None]
    return x * (r * rng.random(size) ** (1.0 / n))[:, None]


def _uniform_sphere(rng, size, n, r):
    x = rng.standard_normal((size, n))
    return r * x / np.linalg.norm(x, axis=1)[:, None]


def _mc(c, sampler, measure, r, samples, seed, chunk):
    if samples < 10_000:
        raise DomainError("use at least 1e4 samples")
    rng = np.random.default_rng(seed)
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        k = min(chunk, samples - done)
        x = sampler(rng, k, c.n, r)
        y = sampler(rng, k, c.n, r)
        v = np.asarray(c(np.linalg.norm(x - y, axis=1)), dtype=float)
        total += v.sum()
        total_sq += (v * v).sum()
        done += k
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return measure**2 * mean, measure**2 * math.sqrt(var / samples)


def var_ball_bruteforce(c: CovarianceModel, r, samples=1_000_000, seed=0, chunk=200_000):
    """
    Monte Carlo estimate of ``int_{v(r)} int_{v(r)} B(|x - y|) dx dy``.

    Points are drawn uniformly in the ball (Gaussian direction, radius
    ``r U^{1/n}``) from ``numpy.random.default_rng(seed)``.

    Returns
    -------
    estimate, std_error : float
    """
    return _mc(c, _uniform_ball, ball_volume(c.n, r), float(r), int(samples), seed, chunk)


def var_sphere_bruteforce(c: CovarianceModel, r, samples=1_000_000, seed=0, chunk=200_000):
    """Monte Carlo estimate of the sphere double integral; see :func:`var_ball_bruteforce`."""
    if c.n < 2:
        raise DomainError("sphere averages need n >= 2")
    return _mc(c, _uniform_sphere, sphere_area(c.n, r), float(r), int(samples), seed, chunk)
