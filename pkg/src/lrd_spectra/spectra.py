"""
Spectral measures of isotropic fields and the covariance/spectrum transforms.

A :class:`SpectralMeasure` on ``[0, inf)`` is stored in one of four tagged
representations (``atoms``, ``radial_density``, ``piecewise_density``,
``distribution``).  All kernel integrals ``int K(lambda r) dG(lambda)`` go
through :meth:`SpectralMeasure.integrate`, which dispatches per component to
the oscillatory engine in :mod:`lrd_spectra.quadrature`.

Conventions
-----------
``G'(lambda) = 2 pi^{n/2} / Gamma(n/2) * lambda^{n-1} g(lambda)`` links the
spectral distribution ``G`` and the isotropic density ``g``, and

    B(r) = int_0^inf Y_n(lambda r) dG(lambda).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (DomainError, IntegrabilityError, NonConvergenceWarning, TailDivergenceError,
                     UnavailableQuantityError)
from .quadrature import (
    DEFAULT_TOL,
    BesselKernel,
    QuadResult,
    _smooth_tail,
    gauss_kronrod,
    integrate_against_kernel,
)

__all__ = [
    "DensityPiece",
    "SpectralMeasure",
    "CovarianceModel",
    "density_weight",
    "covariance_kernel",
    "cov_from_spectrum",
    "spectrum_from_cov",
    "density_from_cov",
    "integrate_kernel",
]

# above this many oscillation nodes a finite piece is done as a difference of tails
_MAX_DIRECT_NODES = 4000
_COS = BesselKernel(-0.5)


def density_weight(n, lam):
    """Factor ``2 pi^{n/2} / Gamma(n/2) * lambda^{n-1}`` turning ``g`` into ``G'``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2) * np.asarray(lam, dtype=float) ** (n - 1)


def covariance_kernel(n):
    """``Y_n`` as a :class:`BesselKernel`."""
    return BesselKernel((n - 2) / 2.0)


def _vec(func):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(func(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).astype(float)
        return out

    return wrapped


@dataclass(frozen=True)
class DensityPiece:
    """
    One additive contribution to ``G'`` on ``(lo, hi]``.

    With ``inverse_cos_freq = w`` the contribution is ``func(lambda) *
    cos(w / lambda)``; such pieces are integrated in ``u = 1/lambda`` where
    the oscillation becomes regular.
    """

    lo: float
    hi: float
    func: Callable
    inverse_cos_freq: float | None = None
    points: tuple = ()

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise DomainError(f"piece bounds must satisfy 0 <= lo < hi, got ({self.lo}, {self.hi})")
        if self.inverse_cos_freq is not None and self.inverse_cos_freq <= 0:
            raise DomainError("inverse_cos_freq must be positive")


class SpectralMeasure:
    """
    Spectral distribution ``G`` of an ``n``-dimensional isotropic field.

    Use the ``from_*`` constructors rather than ``__init__``.

    Attributes
    ----------
    n : int
    kind : str
        One of ``atoms``, ``radial_density``, ``piecewise_density``,
        ``distribution``.
    """

    KINDS = ("atoms", "radial_density", "piecewise_density", "distribution")

    def __init__(self, n, kind, *, pieces=(), atoms=(), distribution=None, g=None,
                 total_mass=None, support=None, points=()):
        if int(n) != n or n < 1:
            raise DomainError("dimension n must be an integer >= 1")
        if kind not in self.KINDS:
            raise DomainError(f"unknown representation {kind!r}")
        self.n = int(n)
        self.kind = kind
        self.pieces = tuple(pieces)
        self.atoms = tuple((float(l), float(m)) for l, m in atoms)
        for l, m in self.atoms:
            if l < 0 or m <= 0:
                raise DomainError("atoms need location >= 0 and mass > 0")
        self._G = distribution
        self._g = g
        self.support = support
        self.points = tuple(sorted(points))
        self._mass = None if total_mass is None else float(total_mass)
        if self._mass is not None and self._mass <= 0:
            raise DomainError("total mass must be positive")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_atoms(cls, n, atoms):
        """Finite sum of point masses ``[(lambda_i, mass_i), ...]``."""
        atoms = list(atoms)
        if not atoms:
            raise DomainError("need at least one atom")
        return cls(n, "atoms", atoms=atoms)

    @classmethod
    def from_radial_density(cls, n, g, *, hi=math.inf, points=(), total_mass=None):
        """Absolutely continuous measure given by the isotropic density ``g``."""
        gv = _vec(g)
        piece = DensityPiece(0.0, hi, lambda lam: density_weight(n, lam) * gv(lam), None, tuple(points))
        return cls(n, "radial_density", pieces=[piece], g=gv, total_mass=total_mass, points=points)

    @classmethod
    def from_pieces(cls, n, pieces: Sequence[DensityPiece], total_mass=None):
        """Sum of :class:`DensityPiece` contributions to ``G'`` (pieces may overlap)."""
        pieces = [DensityPiece(p.lo, p.hi, _vec(p.func), p.inverse_cos_freq, tuple(p.points))
                  for p in pieces]
        if not pieces:
            raise DomainError("need at least one piece")
        pts = sorted({x for p in pieces for x in (p.lo, p.hi, *p.points) if math.isfinite(x)})
        return cls(n, "piecewise_density", pieces=pieces, total_mass=total_mass, points=pts)

    @classmethod
    def from_distribution(cls, n, G, total_mass, *, support=None, points=()):
        """
        Measure given by its distribution function.

        ``support`` (optional) is a point beyond which ``G`` equals the total
        mass; it lets kernel integrals stop there.
        """
        if G(0.0) < 0:
            raise DomainError("G(0) must be nonnegative")
        return cls(n, "distribution", distribution=_vec(G), total_mass=total_mass,
                   support=support, points=points)

    # -- basic quantities -----------------------------------------------------
    @property
    def total_mass(self):
        """``G(inf)``, which equals ``B(0)``."""
        if self._mass is None:
            self._mass = self.cdf(math.inf)
        return self._mass

    def density(self, lam):
        """``G'(lambda)``."""
        if self.kind in ("atoms", "distribution"):
            raise UnavailableQuantityError(f"no density for a {self.kind} measure")
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        for p in self.pieces:
            inside = (lam > p.lo) & (lam <= p.hi)
            if np.any(inside):
                v = p.func(lam[inside])
                if p.inverse_cos_freq is not None:
                    v = v * np.cos(p.inverse_cos_freq / lam[inside])
                out[inside] += v
        return float(out) if out.ndim == 0 else out

    def radial_density(self, lam):
        """Isotropic spectral density ``g(lambda)``, ``lambda > 0``."""
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0):
            raise DomainError("g is evaluated at lambda > 0")
        if self._g is not None:
            out = self._g(lam)
        else:
            out = self.density(lam) / density_weight(self.n, lam)
        return float(out) if np.ndim(out) == 0 else out

    def cdf(self, lam):
        """``G(lambda) = int_0^lambda dG``."""
        return self.moment(lam, 0.0)

    def moment(self, lam, p=2.0, tol=1e-12):
        r"""Truncated moment :math:`\int_0^\lambda \mu^p\,dG(\mu)`."""
        lam = float(lam)
        if lam < 0:
            raise DomainError("lambda must be >= 0")
        total = 0.0
        for loc, mass in self.atoms:
            if loc <= lam:
                total += mass * (loc**p if p else 1.0)
        if self.kind == "distribution":
            if p != 0:
                # int mu^p dG = lam^p G(lam) - p int mu^{p-1} G
                upto = lam if self.support is None else min(lam, self.support)
                if not math.isfinite(upto):
                    raise UnavailableQuantityError("infinite moment range for a distribution")
                edges = np.unique([0.0, *[x for x in self.points if x < upto], upto])
                v, _, _ = gauss_kronrod(lambda m: m ** (p - 1) * self._G(m), edges, tol=tol)
                big = self._G(lam) if math.isfinite(lam) else self.total_mass
                return total + lam**p * big - p * v.sum()
            return total + (self._G(lam) if math.isfinite(lam) else self._mass)
        for piece in self.pieces:
            total += _piece_moment(piece, p, lam, tol)
        return total

    # -- kernel integrals -----------------------------------------------------
    def integrate(self, kernel: BesselKernel, r, tol=DEFAULT_TOL, rtol=0.0, max_panels=200):
        r"""
        :math:`\int_0^\infty K(\lambda r)\,dG(\lambda)` for a :class:`BesselKernel`.

        ``r = 0`` is returned exactly as ``K(0) G(inf)``.
        """
        r = float(r)
        if r < 0:
            raise DomainError("r must be >= 0")
        if r == 0.0:
            k0 = float(kernel(np.array([0.0]))[0])
            return QuadResult(k0 * self.total_mass, 0.0, True, 0)
        value, error, ok, panels, div = 0.0, 0.0, True, 0, False
        for loc, mass in self.atoms:
            value += mass * float(kernel(np.array([loc * r]))[0])
        if self.kind == "distribution":
            res = _distribution_integral(self, kernel, r, tol, rtol, max_panels)
            parts = [res]
        else:
            parts = [_piece_kernel_integral(p, kernel, r, tol / max(1, len(self.pieces)),
                                            rtol, max_panels)
                     for p in self.pieces]
        for res in parts:
            value += res.value
            error += res.error
            ok = ok and res.converged
            panels += res.panels
            div = div or res.divergent
        return QuadResult(value, error, ok, panels, div)

    def __repr__(self):
        return f"SpectralMeasure(n={self.n}, kind={self.kind!r})"


def _piece_moment(piece, p, lam, tol):
    hi = min(piece.hi, lam)
    if hi <= piece.lo:
        return 0.0
    if piece.inverse_cos_freq is None:
        pts = [x for x in piece.points if piece.lo < x < hi]

        def f(m):
            return piece.func(m) * (m**p if p else 1.0)

        if math.isfinite(hi):
            v, _, _ = gauss_kronrod(f, np.unique([piece.lo, *pts, hi]), tol=tol)
            return float(v.sum())
        t0 = max([piece.lo + 1.0, *pts])
        v, _, _ = gauss_kronrod(f, np.unique([piece.lo, *pts, t0]), tol=tol)
        return float(v.sum()) + _smooth_tail(f, t0, tol).value
    w = piece.inverse_cos_freq

    def fu(u):
        m = 1.0 / u
        return piece.func(m) * (m**p if p else 1.0) / (u * u)

    upper = 1.0 / piece.lo if piece.lo > 0 else None
    res = integrate_against_kernel(fu, _COS, w, a=1.0 / hi, upper=upper, tol=tol)
    return res.value


def _kernel_node_points(kernel, r, u_lo, u_hi, cap=20000):
    # u-locations where K(r/u) crosses a node, for u in [u_lo, u_hi]
    z_lo, z_hi = r / u_hi, r / u_lo
    count = int((z_hi - z_lo) / math.pi) + 4
    if count > cap:
        count = cap
    z = kernel.nodes(z_lo, count)
    z = z[(z > z_lo) & (z < z_hi)]
    return tuple(np.sort(r / z))


def _piece_kernel_integral(piece, kernel, r, tol, rtol, max_panels):
    if piece.inverse_cos_freq is None:
        f = piece.func
        pts = [x for x in piece.points if piece.lo < x < piece.hi]
        if not math.isfinite(piece.hi):
            return integrate_against_kernel(f, kernel, r, a=piece.lo, points=pts, tol=tol,
                                            rtol=rtol, max_panels=max_panels)
        nodes = (piece.hi - piece.lo) * r / math.pi
        if nodes <= _MAX_DIRECT_NODES:
            return integrate_against_kernel(f, kernel, r, a=piece.lo, points=pts, upper=piece.hi,
                                            tol=tol, rtol=rtol, max_panels=max_panels)
        # many oscillations: int_lo^hi = int_lo^inf - int_hi^inf with f extended
        a = integrate_against_kernel(f, kernel, r, a=piece.lo, points=pts, tol=tol * 0.5,
                                     rtol=rtol, max_panels=max_panels)
        b = integrate_against_kernel(f, kernel, r, a=piece.hi, tol=tol * 0.5, rtol=rtol,
                                     max_panels=max_panels)
        return QuadResult(a.value - b.value, a.error + b.error, a.converged and b.converged,
                          a.panels + b.panels, a.divergent or b.divergent)
    w = piece.inverse_cos_freq
    u_a = 1.0 / piece.hi
    upper = 1.0 / piece.lo if piece.lo > 0 else None

    def g(u):
        return piece.func(1.0 / u) * kernel(r / u) / (u * u)

    # resolve the K(r/u) oscillation where it is faster than cos(w u)
    u_h = max(u_a, 3.0 * math.sqrt(r / w))
    if upper is not None:
        u_h = min(u_h, upper)
    pts = _kernel_node_points(kernel, r, u_a, u_h) if u_h > u_a else ()
    pts = tuple(pts) + ((u_h,) if u_h > u_a and upper is None else ())
    return integrate_against_kernel(g, _COS, w, a=u_a, points=pts, upper=upper, tol=tol,
                                    rtol=rtol, max_panels=max_panels)


def _distribution_integral(m, kernel, r, tol, rtol, max_panels):
    # Stieltjes by parts: int K dG = K(0) G(inf) + r int (G(inf) - G) K'(lambda r) dlambda
    mass = m.total_mass
    k0 = float(kernel(np.array([0.0]))[0])
    G = m._G

    def h(lam):
        return mass - G(lam)

    value, error, ok, panels, div = k0 * mass, 0.0, True, 0, False
    for dk in kernel.derivative():
        if m.support is not None:
            res = integrate_against_kernel(h, dk, r, points=m.points, upper=m.support, tol=tol / r,
                                           rtol=rtol, max_panels=max_panels)
        else:
            res = integrate_against_kernel(h, dk, r, points=m.points, tol=tol / r, rtol=rtol,
                                           max_panels=max_panels)
        value += r * res.value
        error += r * res.error
        ok = ok and res.converged
        panels += res.panels
        div = div or res.divergent
    return QuadResult(value, error, ok, panels, div)


@dataclass(frozen=True)
class CovarianceModel:
    """
    Radial covariance ``B(r)`` of an ``n``-dimensional isotropic field.

    Parameters
    ----------
    n : int
    B : callable
        Vectorised in ``r``; must be stable near ``r = 0``.
    variance : float, optional
        ``B(0)``; evaluated from ``B`` when omitted.
    points : tuple
        Points where ``B`` is not smooth, passed to the quadrature.
    """

    n: int
    B: Callable
    variance: float | None = None
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("dimension n must be an integer >= 1")
        if self.variance is None:
            object.__setattr__(self, "variance", float(np.asarray(self.B(np.array([0.0])))[0]))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.B(np.atleast_1d(r)), dtype=float).reshape(np.shape(np.atleast_1d(r)))
        out = np.where(np.atleast_1d(r) == 0.0, self.variance, out)
        return float(out[0]) if r.ndim == 0 else out


def integrate_kernel(m: SpectralMeasure, kernel: BesselKernel, r, tol=DEFAULT_TOL, rtol=0.0,
                     max_panels=200):
    """Functional form of :meth:`SpectralMeasure.integrate`."""
    return m.integrate(kernel, r, tol=tol, rtol=rtol, max_panels=max_panels)


def cov_from_spectrum(m: SpectralMeasure, r, tol=DEFAULT_TOL, full_output=False):
    """
    Covariance ``B(r) = int Y_n(lambda r) dG(lambda)``.

    Exact at ``r = 0``.  With ``full_output`` a :class:`QuadResult` is
    returned instead of the bare value.  Accepts an array of ``r``.
    """
    if np.ndim(r):
        res = [cov_from_spectrum(m, x, tol, True) for x in np.asarray(r, dtype=float)]
        return res if full_output else np.array([x.value for x in res])
    res = m.integrate(covariance_kernel(m.n), r, tol=tol)
    if not res.converged:
        warnings.warn(f"covariance integral not converged at r={r:g}", NonConvergenceWarning, stacklevel=2)
    return res if full_output else res.value


def _check_result(res, what):
    if res.divergent:
        raise TailDivergenceError(
            f"{what}: tail panels do not contract (estimate {res.value:.6g} after {res.panels} panels)"
        )
    return res


def spectrum_from_cov(c: CovarianceModel, lam, tol=DEFAULT_TOL, full_output=False):
    r"""
    Spectral distribution from the covariance by the inversion formula

    .. math:: G(\lambda) = \frac{2^{(2-n)/2}}{\Gamma(n/2)}
              \int_0^\infty J_{n/2}(\lambda r)(\lambda r)^{n/2}\frac{B(r)}{r}\,dr.

    ``lambda = 0`` returns 0 and ``lambda = inf`` returns ``B(0)``.

    Raises
    ------
    TailDivergenceError
        If the panel contributions do not contract.
    """
    if np.ndim(lam):
        res = [spectrum_from_cov(c, x, tol, True) for x in np.asarray(lam, dtype=float)]
        return res if full_output else np.array([x.value for x in res])
    lam = float(lam)
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    if lam == 0.0:
        return QuadResult(0.0, 0.0) if full_output else 0.0
    if math.isinf(lam):
        return QuadResult(c.variance, 0.0) if full_output else c.variance
    n = c.n
    nu = n / 2.0
    const = 2.0 ** ((2 - n) / 2) / math.gamma(n / 2) / (2.0**nu * math.gamma(nu + 1))
    kern = BesselKernel(nu, None, float(n), const)

    def f(r):
        return np.asarray(c.B(r), dtype=float) / r

    res = _check_result(
        integrate_against_kernel(f, kern, lam, points=c.points, tol=tol, max_panels=400),
        "spectrum_from_cov",
    )
    return res if full_output else res.value


def _envelope_decays(c: CovarianceModel):
    # r^{(n-1)/2} |B(r)| must tend to 0 for the density integral to converge
    e = []
    for R in (1e3, 1e4, 1e5, 1e6):
        r = np.linspace(R, 2 * R, 257)
        e.append(np.max(r ** ((c.n - 1) / 2) * np.abs(c.B(r))))
    e = np.array(e)
    return bool(e[-1] < 0.8 * e[0] or e[-1] < 1e-12)


def density_from_cov(c: CovarianceModel, lam, tol=DEFAULT_TOL, full_output=False):
    r"""
    Isotropic spectral density

    .. math:: g(\lambda) = (2\pi)^{-n/2}\int_0^\infty J_{(n-2)/2}(\lambda r)
              (\lambda r)^{(2-n)/2} r^{n-1} B(r)\,dr.

    The integral converges (conditionally) when ``r^{(n-1)/2} B(r) -> 0``.
    Covariances decaying slower than that are rejected with
    :class:`IntegrabilityError` instead of returning a meaningless number.
    """
    if np.ndim(lam):
        res = [density_from_cov(c, x, tol, True) for x in np.asarray(lam, dtype=float)]
        return res if full_output else np.array([x.value for x in res])
    lam = float(lam)
    if lam <= 0:
        raise DomainError("density_from_cov needs lambda > 0")
    if not _envelope_decays(c):
        raise IntegrabilityError(
            "r^{(n-1)/2} B(r) does not decay; the spectral density integral diverges"
        )
    n = c.n
    nu = (n - 2) / 2.0
    const = (2 * math.pi) ** (-n / 2) / (2.0**nu * math.gamma(nu + 1))
    kern = BesselKernel(nu, None, 0.0, const)

    def f(r):
        return r ** (n - 1) * np.asarray(c.B(r), dtype=float)

    res = integrate_against_kernel(f, kern, lam, points=c.points, tol=tol, max_panels=400)
    if res.divergent:
        raise IntegrabilityError(
            f"density integral tail does not contract at lambda={lam:g}"
        )
    return res if full_output else res.value
