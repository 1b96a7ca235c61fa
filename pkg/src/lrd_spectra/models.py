"""
Catalogue of closed-form covariance/spectrum pairs.

Every entry is a :class:`ModelSpec` that bundles a covariance ``B``, its
spectral measure and any further closed forms (``G``, ``g``, ``b_n``,
``l_n``), together with the asymptotic behaviour the model is known to
have.  Closed forms are the ground truth the numeric transforms are tested
against; :func:`model_eval` prefers them and falls back to the transforms.

Ids (the CLI vocabulary)::

    exp_gamma, truncated_quadratic, cauchy_bessel, linnik,
    piecewise_oscillatory, sqrt_oscillatory, or_construction,
    directional_exp, directional_truncated
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable

import numpy as np
from scipy import integrate as si
from scipy import optimize
from scipy import special as sp

from . import functionals, spectra
from .asymptotics import ball_variance_constant, c1, c2, c3
from .directional import DirectionalDensity, cov_from_directional, zonal_harmonic
from .errors import DomainError, UnavailableQuantityError
from .specfun import cosine_integral, normalized_bessel, sine_integral
from .spectra import CovarianceModel, DensityPiece, SpectralMeasure, density_weight

__all__ = [
    "ModelSpec",
    "MODEL_IDS",
    "catalog",
    "get_model",
    "model_eval",
    "linnik_density",
    "linnik_density_closed",
    "or_construction_parameters",
    "QUANTITIES",
]

QUANTITIES = ("cov", "G", "g", "b_n", "l_n", "b_n_scaled", "l_n_scaled", "f")


@dataclass(frozen=True)
class ModelSpec:
    """
    One catalogue entry.

    Attributes
    ----------
    id : str
    n : int
    params : mapping
        Parameter values (read-only).
    covariance : callable
        ``B(r)``, or ``B(r, theta)`` for directional entries.
    spectrum : SpectralMeasure or None
        ``None`` for directional entries, which carry ``directional``.
    expected : mapping
        Known asymptotics: ``alpha``, ``L``, per-theorem expectations
        (``holds``, ``fails_a``, ``fails_b``) and default scales.
    provenance : str
        Where the pair comes from.
    closed : mapping
        Additional closed forms keyed by quantity name.
    """

    id: str
    n: int
    params: MappingProxyType
    covariance: Callable
    spectrum: SpectralMeasure | None
    expected: MappingProxyType
    provenance: str
    closed: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    directional: DirectionalDensity | None = None
    metadata: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    @property
    def is_directional(self):
        return self.directional is not None

    def covariance_model(self):
        """The isotropic covariance as a :class:`CovarianceModel`."""
        if self.is_directional:
            raise UnavailableQuantityError("directional models have no radial covariance")
        return CovarianceModel(self.n, self.covariance, variance=self.spectrum.total_mass,
                               points=tuple(self.metadata.get("cov_points", ())))

    def available(self):
        return sorted(set(self.closed) | {"cov"})


def _freeze(d):
    return MappingProxyType(dict(d))


def _scalar_or_array(func):
    def wrapped(x):
        a = np.asarray(x, dtype=float)
        out = func(np.atleast_1d(a))
        out = np.asarray(out, dtype=float).reshape(np.atleast_1d(a).shape)
        return float(out[0]) if a.ndim == 0 else out

    wrapped.__doc__ = func.__doc__
    return wrapped


def _one_minus_lambda(mu, x):
    """``1 - Lambda_mu(x)``, without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1.0
    if np.any(small):
        s = -(x[small] ** 2) / 4.0
        term = np.ones_like(s)
        acc = np.zeros_like(s)
        for k in range(1, 25):
            term = term * s / (k * (mu + k))
            acc -= term
        out[small] = acc
    if np.any(~small):
        out[~small] = 1.0 - normalized_bessel(mu, x[~small])
    return out


def _scales(lo_exp, count, base=10.0):
    # r0 * 2^k so that multiples by 2, 4, 8 stay on the grid
    r0 = base**lo_exp
    return tuple(r0 * 2.0**k for k in range(count))


def _decades(a, b):
    return tuple(10.0**k for k in range(a, b + 1))


_REGULAR_SCALES = {"default": _decades(2, 6), "T6-ball": _decades(2, 5), "T6-sphere": _decades(2, 5)}


# ---------------------------------------------------------------------------
# 1. exponential-gamma spectrum
# ---------------------------------------------------------------------------

def exp_gamma(n=3, a=1.0):
    """``G' = a^{n-1} l^{n-2} e^{-a l}/(n-2)!`` with ``B = a^{n-1}/(r^2+a^2)^{(n-1)/2}``."""
    n = int(n)
    if n < 3 or a <= 0:
        raise DomainError("exp_gamma needs n >= 3 and a > 0")
    k = a ** (n - 1) / math.factorial(n - 2)
    m = SpectralMeasure.from_pieces(
        n, [DensityPiece(0.0, math.inf, lambda l: k * l ** (n - 2) * np.exp(-a * l), points=(1.0 / a,))],
        total_mass=1.0)

    def B(r):
        r = np.asarray(r, dtype=float)
        return a ** (n - 1) / (r * r + a * a) ** ((n - 1) / 2)

    closed = {
        "G": lambda l: sp.gammainc(n - 1, a * np.asarray(l, dtype=float)),
        "g": lambda l: k * np.asarray(l, dtype=float) ** (n - 2) * np.exp(-a * np.asarray(l, dtype=float))
        / density_weight(n, l),
        "moment2": lambda l: (n * n * math.gamma(n - 1) - n * math.gamma(n - 1)
                              - sp.gammaincc(n + 1, a * l) * math.gamma(n + 1)) / (a * a * math.gamma(n - 1)),
    }
    alpha = n - 1.0
    th = {"T2": "holds", "T3": "holds", "T4": "holds", "T6-ball": "holds", "bingham_gamma2": "holds"}
    expected = {
        "alpha": alpha,
        "L": a ** (n - 1),
        "bingham_L0": (n - 1) / (2 * a * a),
        "theorems": th,
        "scales": _REGULAR_SCALES,
    }
    return ModelSpec("exp_gamma", n, _freeze({"n": n, "a": a}), B, m, _freeze(expected),
                     "exponential-gamma spectrum; Bingham gamma = 2 example", _freeze(closed))


# ---------------------------------------------------------------------------
# 2. truncated quadratic G = min(l^2, a^2)
# ---------------------------------------------------------------------------

def _b3_truncated(a):
    def b3(r):
        r = np.asarray(r, dtype=float)
        x = a * r
        out = np.empty_like(x)
        small = x < 1.0
        if np.any(small):
            # series of 2x^4 - 2x^2 + 2x sin 2x - 1 + cos 2x, from x^6 on
            xs = x[small]
            acc = np.zeros_like(xs)
            for m in range(3, 30):
                acc += (-1) ** (m - 1) * 4.0**m * (2 * m - 1) / math.factorial(2 * m) * xs ** (2 * m)
            out[small] = acc
        if np.any(~small):
            xb = x[~small]
            out[~small] = 2 * xb**4 - 2 * xb**2 + 2 * np.sin(2 * xb) * xb - 1 + np.cos(2 * xb)
        return 4 * math.pi**2 / a**4 * out

    return b3


def truncated_quadratic(n=3, a=1.0):
    """
    ``G(l) = min(l^2, a^2)``.

    For ``n >= 3`` the covariance is ``2(n-2)(1 - Lambda_{(n-4)/2}(a r))/r^2``,
    which is ``2(1 - cos ar)/r^2`` at ``n = 3`` and the degree-9 rational
    trigonometric form at ``n = 9``.
    """
    n = int(n)
    if n < 3 or a <= 0:
        raise DomainError("truncated_quadratic needs n >= 3 and a > 0")
    m = SpectralMeasure.from_pieces(n, [DensityPiece(0.0, a, lambda l: 2.0 * l)], total_mass=a * a)
    mu = (n - 4) / 2.0

    def B(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2 * (n - 2) * _one_minus_lambda(mu, a * r) / (r * r)
        return np.where(r == 0, a * a, out)

    closed = {"G": lambda l: np.minimum(np.asarray(l, dtype=float) ** 2, a * a),
              "g": lambda l: np.where(np.asarray(l) <= a, 2.0 * np.asarray(l, dtype=float), 0.0)
              / density_weight(n, l)}
    if n == 3:
        closed["b_n"] = _b3_truncated(a)
    reg = "fails_a" if n == 3 else "holds"
    th = {"T3": reg, "T4": reg, "T6-ball": "holds"}
    if (n - 3) / 2 < 2:
        th["T2"] = reg
    if n >= 4:
        th["T6-sphere"] = "holds"
    expected = {
        "alpha": 2.0,
        "L": c1(n, 2.0),
        "theorems": th,
        "scales": _REGULAR_SCALES,
    }
    prov = "truncated quadratic spectrum" + (" (oscillating r^2 B)" if n == 3 else "")
    return ModelSpec("truncated_quadratic", n, _freeze({"n": n, "a": a}), B, m, _freeze(expected),
                     prov, _freeze(closed), metadata=_freeze({"cov_points": ()}))


# ---------------------------------------------------------------------------
# 3. Cauchy / Bessel covariance
# ---------------------------------------------------------------------------

def cauchy_bessel(n=6, kappa=4.0):
    """``B = (1 + r^2)^{-kappa/2}`` with a ``K_{(n-kappa)/2}`` spectral density."""
    n = int(n)
    if n < 1 or kappa <= 0:
        raise DomainError("cauchy_bessel needs n >= 1 and kappa > 0")
    pref = 1.0 / (math.pi ** (n / 2) * 2.0 ** ((n + kappa - 2) / 2) * math.gamma(kappa / 2))
    order = (n - kappa) / 2

    def g(l):
        l = np.asarray(l, dtype=float)
        return pref * sp.kv(order, l) * l ** ((kappa - n) / 2)

    def B(r):
        return (1.0 + np.asarray(r, dtype=float) ** 2) ** (-kappa / 2)

    m = SpectralMeasure.from_radial_density(n, g, points=(1.0,), total_mass=1.0)
    th = {}
    if kappa < n:
        th.update({"T3": "holds", "T4": "holds", "T6-ball": "holds"})
        if (n - 3) / 2 < kappa:
            th["T2"] = "holds"
        if n >= 2 and kappa < n - 1:
            th["T6-sphere"] = "holds"
    expected = {
        "alpha": float(kappa),
        "L": 1.0,
        "theorems": th,
        "scales": _REGULAR_SCALES,
    }
    return ModelSpec("cauchy_bessel", n, _freeze({"n": n, "kappa": kappa}), B, m, _freeze(expected),
                     "Cauchy covariance with Bessel-K spectral density", _freeze({"g": g}))


# ---------------------------------------------------------------------------
# 4. (generalised) Linnik covariance
# ---------------------------------------------------------------------------

def linnik_density_closed(lam):
    """Closed form of the ``(n, kappa, nu) = (3, 1, 2)`` density via Si and Ci."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("lambda must be positive")
    si_, ci_ = sine_integral(lam), cosine_integral(lam)
    num = (np.sin(lam) * (2 * ci_ + 2 * lam * si_ - lam * math.pi)
           + np.cos(lam) * (math.pi - 2 * si_ + 2 * lam * ci_))
    out = num / (4 * lam * math.pi**2)
    return float(out) if out.ndim == 0 else out


def _linnik_phi(u, kappa, nu):
    z = 1.0 + u**kappa * np.exp(0.5j * math.pi * kappa)
    return np.sin(nu * np.angle(z)) / np.abs(z) ** nu


def linnik_density(lam, n=3, kappa=1.0, nu=2.0, epsrel=1e-11):
    r"""
    Isotropic density of ``(1 + r^kappa)^{-nu}`` for ``0 < kappa < 2``.

    .. math:: g(\lambda) = \frac{\lambda^{1-n/2}}{2^{n/2-1}\pi^{n/2+1}}
              \int_0^\infty K_{n/2-1}(\lambda u)
              \frac{\sin(\nu\arg(1+u^\kappa e^{i\pi\kappa/2}))}
                   {|1+u^\kappa e^{i\pi\kappa/2}|^\nu} u^{n/2}\,du

    evaluated after the substitution ``v = lambda u`` by adaptive
    quadrature on ``[0, 60]`` (``K`` is below ``e^{-60}`` beyond).
    """
    if not 0 < kappa < 2:
        raise DomainError("the Bessel-K representation needs 0 < kappa < 2")
    if nu <= 0:
        raise DomainError("nu must be positive")
    order = n / 2 - 1
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr <= 0):
        raise DomainError("lambda must be positive")
    pref = 1.0 / (2.0 ** (n / 2 - 1) * math.pi ** (n / 2 + 1))
    out = np.empty_like(lam_arr)
    for i, x in enumerate(lam_arr):
        def f(v, x=x):
            return sp.kv(order, v) * v ** (n / 2) * _linnik_phi(v / x, kappa, nu)

        pts = sorted({p for p in (x, 1.0, 10.0) if 0 < p < 60.0})
        val, _ = si.quad(f, 0.0, 60.0, points=pts, limit=400, epsabs=0.0, epsrel=epsrel)
        out[i] = pref * x ** (-n) * val
    return float(out[0]) if np.ndim(lam) == 0 else out


def linnik(n=3, kappa=1.0, nu=2.0):
    """Generalised Linnik covariance ``(1 + r^kappa)^{-nu}``; ``nu = 1`` is the Linnik case."""
    n = int(n)
    if not 0 < kappa <= 2 or nu <= 0:
        raise DomainError("linnik needs 0 < kappa <= 2 and nu > 0")

    def B(r):
        return (1.0 + np.asarray(r, dtype=float) ** kappa) ** (-nu)

    closed = {}
    if kappa == 2:
        g = cauchy_bessel(n, 2 * nu).closed["g"]
    elif (n, kappa, nu) == (3, 1.0, 2.0):
        g = linnik_density_closed
        closed["g"] = g
    else:
        def g(l):
            return linnik_density(l, n, kappa, nu)

    m = SpectralMeasure.from_radial_density(n, g, points=(1.0,), total_mass=1.0)
    alpha = kappa * nu
    th = {}
    if alpha < n:
        th.update({"T3": "holds", "T4": "holds", "T6-ball": "holds"})
        if (n - 3) / 2 < alpha:
            th["T2"] = "holds"
        if alpha < n - 1:
            th["T6-sphere"] = "holds"
    expected = {
        "alpha": alpha,
        "L": 1.0,
        "density_limit": 1.0 / c2(n, alpha) if alpha < n else None,
        "theorems": th,
        "scales": dict(_REGULAR_SCALES, **{"T6-ball": _decades(3, 6)}),
    }
    return ModelSpec("linnik", n, _freeze({"n": n, "kappa": kappa, "nu": nu}), B, m, _freeze(expected),
                     "generalised Linnik characteristic function", _freeze(closed))


# ---------------------------------------------------------------------------
# 5. piecewise oscillatory density, n = 3
# ---------------------------------------------------------------------------

def _piecewise_B(r):
    r = np.asarray(r, dtype=float)
    cr, sr = np.cos(r), np.sin(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (4 - cr - cr * math.cos(1) - 2 * cr**2) * r**2 - r * sr * math.sin(1) - 3 + cr + 2 * cr**2
        return 4 * math.pi / (r**2 * (r**2 - 1)) * num


def piecewise_oscillatory():
    """``g = (2 + cos l)/l`` on ``(0, 1]``, ``1/l`` on ``(1, 2]``, zero beyond (n = 3)."""
    n = 3
    pieces = [DensityPiece(0.0, 1.0, lambda l: 4 * math.pi * l * (2 + np.cos(l))),
              DensityPiece(1.0, 2.0, lambda l: 4 * math.pi * l)]
    G1 = 4 * math.pi * (math.sin(1) + math.cos(1))
    total = G1 + 2 * math.pi * 3
    m = SpectralMeasure.from_pieces(n, pieces, total_mass=total)
    numeric = None

    def B(r):
        nonlocal numeric
        r = np.asarray(r, dtype=float)
        out = _piecewise_B(r)
        # removable singularities at r = 0 and r = 1
        bad = (r < 0.05) | (np.abs(r - 1) < 0.02)
        if np.any(bad):
            out = np.array(out, dtype=float)
            out[bad] = [spectra.cov_from_spectrum(m, x, tol=1e-13) for x in r[bad]]
        return out

    def G(l):
        l = np.asarray(l, dtype=float)
        lo = np.minimum(l, 1.0)
        head = 4 * math.pi * (lo**2 + lo * np.sin(lo) - 2 * np.sin(lo / 2) ** 2)
        hi = np.clip(l, 1.0, 2.0)
        return head + 2 * math.pi * (hi**2 - 1)

    def g(l):
        l = np.asarray(l, dtype=float)
        return np.where(l <= 1, (2 + np.cos(l)) / l, np.where(l <= 2, 1.0 / l, 0.0))

    th = {"T2": "fails_a", "T3": "fails_a", "T4": "fails_a", "T6-ball": "holds"}
    expected = {
        "alpha": 2.0,
        "L": c1(3, 2.0) * 6 * math.pi,
        "G_limit": 6 * math.pi,
        "theorems": th,
        "scales": _REGULAR_SCALES,
    }
    return ModelSpec("piecewise_oscillatory", n, _freeze({"n": 3}), B, m, _freeze(expected),
                     "piecewise oscillating density; r^2 B(r) not regularly varying",
                     _freeze({"G": G, "g": g}), metadata=_freeze({"cov_points": (1.0,)}))


# ---------------------------------------------------------------------------
# 6. square-root oscillatory density, n = 3
# ---------------------------------------------------------------------------

_C5 = 4 * math.pi / (2 * math.pi) ** 1.5


def _sqrt_B(r):
    r = np.asarray(r, dtype=float)
    s = np.sqrt(r)
    num = (16 * np.sqrt(np.sqrt(2500 + r * r) - 50) + 8 * s + np.exp(-4 * s)
           - np.sin(4 * s) - np.cos(4 * s))
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / (8 * r)


def _sqrt_l3(r):
    r = np.asarray(r, dtype=float)
    q = np.sqrt(2 * r)
    w = np.sqrt(r * r + 5**4)
    br = (128006 - (3 + 12 * q) * np.sin(4 * q) + 2**8 * math.sqrt(2) * r**1.5
          - 12 * q * np.exp(-4 * q) + (12 * q - 3) * np.cos(4 * q) - 3 * np.exp(-4 * q)
          + 2**9 * np.sqrt(50 + 2 * w) * (w - 50))
    return math.pi**2 * r**2 / 24 * br


def sqrt_oscillatory():
    """``g = (e^{-50 l} + sin^2(2/l)) / ((2 pi)^{3/2} l^{5/2})`` (n = 3)."""
    n = 3
    c = _C5
    pieces = [
        DensityPiece(0.0, 1.0, lambda l: c * l**-0.5 * (np.exp(-50 * l) + 0.5), points=(0.02,)),
        DensityPiece(0.0, 1.0, lambda l: -0.5 * c * l**-0.5, inverse_cos_freq=4.0),
        DensityPiece(1.0, math.inf, lambda l: c * l**-0.5 * (np.exp(-50 * l) + np.sin(2 / l) ** 2)),
    ]
    m = SpectralMeasure.from_pieces(n, pieces, total_mass=2.2)

    def B(r):
        r = np.asarray(r, dtype=float)
        out = np.array(_sqrt_B(r), dtype=float, ndmin=1).reshape(r.shape) if r.ndim else _sqrt_B(r)
        bad = r < 0.01
        if np.any(bad):
            out = np.array(out, dtype=float, ndmin=1)
            out[np.atleast_1d(bad)] = [spectra.cov_from_spectrum(m, x, tol=1e-13)
                                       for x in np.atleast_1d(r)[np.atleast_1d(bad)]]
            out = out.reshape(r.shape)
        return out

    def l3(r):
        r = np.asarray(r, dtype=float)
        out = np.array(_sqrt_l3(r), dtype=float, ndmin=1)
        bad = np.atleast_1d(r) < 0.1
        if np.any(bad):
            out[bad] = [functionals.var_sphere(m, x) for x in np.atleast_1d(r)[bad]]
        return out.reshape(r.shape) if r.ndim else float(out[0])

    def g(l):
        l = np.asarray(l, dtype=float)
        return (np.exp(-50 * l) + np.sin(2 / l) ** 2) / ((2 * math.pi) ** 1.5 * l**2.5)

    alpha = 0.5
    th = {"T2": "holds", "T3": "holds", "T4": "fails_b", "T6-sphere": "holds",
          "T6-ball": "holds", "OR-ball": "holds", "OR-sphere": "holds", "OR-density": "holds"}
    expected = {
        "alpha": alpha,
        "L": 3.0,
        "G_limit": 3.0 / c1(3, alpha),
        "l3_limit": 3.0 / c1(3, alpha) * c3(3, alpha),
        "theorems": th,
        "scales": {"default": _decades(2, 6), "T6-ball": _decades(3, 6), "T2": _decades(3, 7),
                   "T3": _decades(3, 7), "OR-ball": _scales(1, 12), "OR-sphere": _scales(1, 16),
                   "OR-density": _scales(1, 30)},
    }
    return ModelSpec("sqrt_oscillatory", n, _freeze({"n": 3}), B, m, _freeze(expected),
                     "sqrt-oscillating density in OR but not regularly varying",
                     _freeze({"g": g, "l_n": l3}))


# ---------------------------------------------------------------------------
# 7. O-regularly varying construction
# ---------------------------------------------------------------------------

def _S(n):
    def S(l):
        l = np.asarray(l, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = sp.jv(n / 2, l) ** 2 / l**n
        # S_n(0) = 1 / (2^{n/2} Gamma(n/2 + 1))^2
        return np.where(l == 0, 1.0 / (2 ** (n / 2) * math.gamma(n / 2 + 1)) ** 2, v)

    return S


def _S_integral(n, lo, hi):
    S = _S(n)
    if math.isinf(hi):
        edges = np.concatenate([[lo], np.geomspace(max(lo, 1.0), 4000.0, 60)])
        edges = np.unique(edges[edges >= lo])
        tot = sum(si.quad(S, x, y, limit=400, epsabs=1e-15)[0] for x, y in zip(edges[:-1], edges[1:]))
        # J^2 ~ 2/(pi l) cos^2: tail of l^{-n-1} (1 + cos)/pi
        return tot + 1.0 / (math.pi * n * 4000.0**n)
    edges = np.unique(np.concatenate([[lo, hi], np.arange(math.ceil(lo), hi, 1.0)]))
    edges = edges[(edges >= lo) & (edges <= hi)]
    return sum(si.quad(S, x, y, limit=200, epsabs=1e-15)[0] for x, y in zip(edges[:-1], edges[1:]))


def _S3_antiderivative(x):
    """``int_0^x J_{3/2}^2(u)/u^3 du``; direct quadrature below 0.5 where the closed form cancels."""
    x = float(x)
    if x < 0.5:
        return si.quad(_S(3), 0.0, x, epsabs=1e-16)[0]
    s2, c2 = math.sin(2 * x), math.cos(2 * x)
    v = (2 * sp.sici(2 * x)[0] / 15 + c2 / (15 * x) + s2 / (30 * x**2) - c2 / (30 * x**3) - 1 / (6 * x**3)
         + s2 / (5 * x**4) + c2 / (10 * x**5) - 1 / (10 * x**5))
    return 2 * v / math.pi


def or_construction_parameters(n=3):
    """
    Defaults ``(T, eps, delta1, delta2, A, B)`` for the O-regular construction.

    ``delta1 = delta2 = A/100`` and ``eps = A/(100 B)`` with
    ``A = int_{1/2}^1 S_n`` and ``B = int_0^inf S_n``, ``S_n = J_{n/2}^2(l)/l^n``;
    ``T > 2`` is the smallest value meeting both tail conditions, found by
    bisection on each condition separately.
    """
    A = _S_integral(n, 0.5, 1.0)
    Btot = _S_integral(n, 0.0, math.inf)
    d1 = d2 = A / 100
    eps = A / (100 * Btot)

    def upper_tail(T):  # int_{T/2}^inf S_n
        return Btot - _S_integral(n, 0.0, T / 2) - d1

    def lower_tail(T):  # int_0^{1/T} S_n
        return _S_integral(n, 0.0, 1.0 / T) - d2

    def smallest(f):
        lo, hi = 2.0, 4.0
        while f(hi) >= 0:
            hi *= 2
        return optimize.brentq(f, lo if f(lo) >= 0 else 2.0, hi, xtol=1e-10)

    T = max(smallest(upper_tail), smallest(lower_tail)) * (1 + 1e-9)
    return {"T": T, "eps": eps, "delta1": d1, "delta2": d2, "A": A, "B": Btot}


def or_construction(n=3, T=None, eps=None, levels=12):
    """
    ``G'`` alternating between 1 on ``(1/(2T^{2k+1}), 1/T^{2k+1}]`` and ``eps`` on
    ``(1/T^{2k+3}, 1/(2T^{2k+1})]``, zero above ``1/T``; truncated after
    ``levels`` values of ``k``.
    """
    n = int(n)
    pars = or_construction_parameters(n)
    if T is not None:
        pars["T"] = float(T)
    if eps is not None:
        pars["eps"] = float(eps)
    T, eps = pars["T"], pars["eps"]
    if T <= 2 or eps <= 0:
        raise DomainError("or_construction needs T > 2 and eps > 0")
    segs = []  # (lo, hi, height)
    for k in range(levels):
        top = T ** -(2 * k + 1)
        segs.append((top / 2, top, 1.0))
        segs.append((T ** -(2 * k + 3), top / 2, eps))
    segs.sort()
    pieces = [DensityPiece(lo, hi, (lambda h: (lambda l: np.full_like(np.asarray(l, dtype=float), h)))(h))
              for lo, hi, h in segs]
    lows = np.array([s[0] for s in segs])
    highs = np.array([s[1] for s in segs])
    hts = np.array([s[2] for s in segs])
    total = float(np.sum((highs - lows) * hts))
    m = SpectralMeasure.from_pieces(n, pieces, total_mass=total)

    def G(l):
        l = np.asarray(l, dtype=float)
        cl = np.clip(l[..., None], lows, highs)
        return np.sum((cl - lows) * hts, axis=-1)

    def Gp(l):
        l = np.asarray(l, dtype=float)
        inside = (l[..., None] > lows) & (l[..., None] <= highs)
        return np.sum(inside * hts, axis=-1)

    @_scalar_or_array
    def B(r):
        # int_lo^hi Y_3(l r) dl = (Si(hi r) - Si(lo r))/r for n = 3
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if n != 3:
            return np.array([spectra.cov_from_spectrum(m, x) for x in r])
        out = np.empty_like(r)
        for i, x in enumerate(r):
            if x == 0:
                out[i] = total
            else:
                out[i] = np.sum(hts * (sp.sici(highs * x)[0] - sp.sici(lows * x)[0])) / x
        return out

    def g(l):
        return Gp(l) / density_weight(n, l)

    closed = {"G": G, "Gprime": Gp, "g": g}
    if n == 3:
        def b_scaled(r):
            # (2 pi)^3 sum_j h_j int_{lo_j}^{hi_j} S_3(l r) dl
            r = float(r)
            F = np.array([_S3_antiderivative(x * r) for x in np.concatenate([lows, highs])])
            k = len(lows)
            return (2 * math.pi) ** 3 * float(np.sum(hts * (F[k:] - F[:k]))) / r

        closed["b_n_scaled"] = b_scaled
        closed["b_n"] = lambda r: b_scaled(r) * float(r) ** 6

    expected = {
        "alpha": None,
        "theorems": {"OR-ball": "holds", "OR-density": "holds"},
        # three full periods T^2, eight points per factor T, offset off block edges
        "scales": {"default": tuple(T ** (1 + (j + 0.5) / 8) for j in range(48))},
        "ratio_bounds": (1 / T * pars["A"] / (pars["delta1"] + pars["delta2"] + pars["B"] * eps),
                         1 / T * (pars["delta1"] + pars["delta2"] + pars["B"] * eps) / pars["A"]),
    }
    meta = dict(pars, levels=levels)
    return ModelSpec("or_construction", n, _freeze({"n": n, "T": T, "eps": eps}), B, m,
                     _freeze(expected), "O-regularly varying spectrum outside the slowly varying class",
                     _freeze(closed), metadata=_freeze(meta))


# ---------------------------------------------------------------------------
# 8, 9. radially directional densities, n = 3
# ---------------------------------------------------------------------------

def _dir_exp_B(r, theta):
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    c2_ = np.cos(theta) ** 2
    at = np.arctan(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = r**3 * (7 - 6 * c2_) + 3 * r**2 * (3 * c2_ - 1) * at + 3 * r * (1 - 3 * c2_) + 3 * (3 * c2_ - 1) * at
        return 4 * math.pi / ((1 + r**2) * r**3) * num


def _dir_trunc_B(r, theta):
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    c2_ = np.cos(theta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        num = r * (7 - 4 * np.cos(r) - 3 * c2_ * (2 + np.cos(r))) + 3 * (3 * c2_ - 1) * np.sin(r)
        return 2**2.5 * math.sqrt(math.pi) / r**3 * num


def _directional_cov(closed, d, r_small):
    def B(r, theta):
        r_b, th_b = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        out = np.array(closed(r_b, th_b), dtype=float, ndmin=1).reshape(r_b.shape) if r_b.ndim \
            else np.array([closed(r_b, th_b)], dtype=float)
        rr = np.atleast_1d(r_b)
        tt = np.atleast_1d(th_b)
        out = out.reshape(rr.shape)
        bad = rr < r_small
        if np.any(bad):
            out[bad] = [cov_from_directional(d, x, t) for x, t in zip(rr[bad], tt[bad])]
        return float(out[0]) if r_b.ndim == 0 else out

    return B


def directional_exp():
    """``f = (4 + 3 cos^2 beta) K_{1/2}(rho)/sqrt(8 pi^3 rho) = (5 Y_00 + 2 Y_20) e^{-rho}/(4 pi rho)``."""
    d = DirectionalDensity({0: 5.0, 2: 2.0}, lambda p: np.exp(-np.asarray(p, dtype=float))
                           / (4 * math.pi * np.asarray(p, dtype=float)), points=(1.0,))

    def f(rho, beta):
        rho = np.asarray(rho, dtype=float)
        return (4 + 3 * np.cos(beta) ** 2) * sp.kv(0.5, rho) / np.sqrt(8 * math.pi**3 * rho)

    expected = {
        "alpha": 2.0,
        "S": lambda th: 4 * math.pi * (7 - 6 * np.cos(th) ** 2),
        "S_tilde": lambda th: (4 + 3 * np.cos(th) ** 2) / (4 * math.pi),
        "theorems": {"T11": "holds"},
        "scales": {"default": _decades(2, 6)},
    }
    return ModelSpec("directional_exp", 3, _freeze({"n": 3}), _directional_cov(_dir_exp_B, d, 0.02), None,
                     _freeze(expected), "radially directional field with K_1/2 radial profile",
                     _freeze({"f": f}), directional=d)


def directional_truncated():
    """``f = (4 + 3 cos^2 beta)/(2^{3/2} pi^{3/2} rho)`` on ``rho <= 1``."""
    k = 1.0 / (2**1.5 * math.pi**1.5)
    d = DirectionalDensity({0: 5.0, 2: 2.0}, lambda p: k / np.asarray(p, dtype=float), support=1.0)

    def f(rho, beta):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho <= 1, (4 + 3 * np.cos(beta) ** 2) * k / rho, 0.0)

    expected = {
        "alpha": 2.0,
        "S_tilde": lambda th: (4 + 3 * np.cos(th) ** 2) * k,
        "theorems": {"T11": "fails_a"},
        "scales": {"default": _decades(2, 6)},
    }
    return ModelSpec("directional_truncated", 3, _freeze({"n": 3}), _directional_cov(_dir_trunc_B, d, 0.05),
                     None, _freeze(expected), "truncated directional density; neither directional nor anisotropic",
                     _freeze({"f": f}), directional=d)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_FACTORIES = {
    "exp_gamma": exp_gamma,
    "truncated_quadratic": truncated_quadratic,
    "cauchy_bessel": cauchy_bessel,
    "linnik": linnik,
    "piecewise_oscillatory": piecewise_oscillatory,
    "sqrt_oscillatory": sqrt_oscillatory,
    "or_construction": or_construction,
    "directional_exp": directional_exp,
    "directional_truncated": directional_truncated,
}
MODEL_IDS = tuple(_FACTORIES)
_CACHE: dict = {}


def get_model(model_id, **params):
    """
    Catalogue entry ``model_id`` with ``params`` overriding the defaults.

    Instances are cached per parameter set.
    """
    if model_id not in _FACTORIES:
        raise UnavailableQuantityError(f"unknown model {model_id!r}; known: {', '.join(MODEL_IDS)}")
    key = (model_id, tuple(sorted(params.items())))
    if key not in _CACHE:
        try:
            _CACHE[key] = _FACTORIES[model_id](**params)
        except TypeError as exc:
            raise DomainError(f"bad parameters for {model_id}: {exc}") from None
    return _CACHE[key]


def catalog():
    """All entries at their default parameters, in a fixed order."""
    return [get_model(i) for i in MODEL_IDS]


def _numeric(spec, quantity, x, tol=None):
    m = spec.spectrum
    if quantity == "cov":
        return spectra.cov_from_spectrum(m, x, tol=tol or 1e-12)
    if quantity == "G":
        return m.cdf(x)
    if quantity == "g":
        return m.radial_density(x)
    rtol = tol or 1e-10
    if quantity == "b_n":
        return functionals.var_ball(m, x, rtol=rtol)
    if quantity == "b_n_scaled":
        return functionals.var_ball_scaled(m, x, rtol=rtol)
    if quantity == "l_n":
        return functionals.var_sphere(m, x, rtol=rtol)
    if quantity == "l_n_scaled":
        return functionals.var_sphere(m, x, rtol=rtol) / x ** (2 * (spec.n - 1))
    raise UnavailableQuantityError(f"{quantity!r} is not available for {spec.id}")


def model_eval(model, quantity, point, *, numeric=False, tol=None, **params):
    """
    Evaluate ``quantity`` of a catalogue model at ``point``.

    Parameters
    ----------
    model : str or ModelSpec
    quantity : str
        ``cov``, ``G``, ``g``, ``b_n``, ``l_n`` (and the scaled variances
        ``b_n_scaled = b_n/r^{2n}``, ``l_n_scaled = l_n/r^{2(n-1)}``).
        Directional entries take ``point = (r, theta)`` for ``cov`` and
        ``(rho, beta)`` for ``f``.
    numeric : bool
        Skip closed forms and use the transforms.
    tol : float, optional
        Tolerance handed to the numeric transforms.

    Raises
    ------
    UnavailableQuantityError
        Unknown quantity, or one the model cannot provide.
    """
    spec = get_model(model, **params) if isinstance(model, str) else model
    if quantity not in QUANTITIES:
        raise UnavailableQuantityError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    if spec.is_directional:
        r, th = point
        if quantity == "cov":
            if numeric:
                return cov_from_directional(spec.directional, r, th, tol=tol or 1e-10)
            return float(spec.covariance(r, th))
        if quantity == "f":
            return float(spec.closed["f"](r, th)) if not numeric else float(spec.directional(r, th))
        raise UnavailableQuantityError(f"{quantity!r} is not available for directional models")
    x = float(point)
    if quantity == "f":
        raise UnavailableQuantityError("'f' is only defined for directional models")
    if not numeric:
        if quantity == "cov":
            return float(spec.covariance(x))
        if quantity in spec.closed:
            return float(spec.closed[quantity](x))
        if quantity == "b_n_scaled" and "b_n" in spec.closed:
            return float(spec.closed["b_n"](x)) / x ** (2 * spec.n)
        if quantity == "l_n_scaled" and "l_n" in spec.closed:
            return float(spec.closed["l_n"](x)) / x ** (2 * (spec.n - 1))
    return float(_numeric(spec, quantity, x, tol))
