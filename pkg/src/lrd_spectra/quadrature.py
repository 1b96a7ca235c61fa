"""
Quadrature engine for Hankel-type integrals.

Three layers:

* :func:`gauss_kronrod` integrates a vectorised integrand over many finite
  intervals at once with the (7, 15) Kronrod pair and global error control.
* :func:`wynn_epsilon` extrapolates a sequence of partial sums.
* :class:`BesselKernel` describes ``c * z**q * Lambda_a(z) [* Lambda_b(z)]``
  and :func:`integrate_against_kernel` integrates ``f(t) K(omega t)`` over
  ``[a, inf)`` by panels between oscillation nodes plus epsilon
  extrapolation.  Products of two Bessel functions are split exactly into a
  smooth mean part and a purely oscillating part before panelling.

:func:`oscillatory_integral` is the public single-Bessel entry point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from .errors import DomainError, NonConvergenceWarning
from .specfun import bessel_j_zero, normalized_bessel

__all__ = [
    "QuadResult",
    "gauss_kronrod",
    "wynn_epsilon",
    "BesselKernel",
    "integrate_against_kernel",
    "oscillatory_integral",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-8
DEFAULT_RTOL = 1e-10

# Kronrod 15-point nodes/weights and the embedded Gauss 7-point weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes ascending
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass
class QuadResult:
    """Value and error estimate of a quadrature, with convergence flags."""

    value: float
    error: float
    converged: bool = True
    panels: int = 0
    divergent: bool = False
    info: dict = field(default_factory=dict)

    def __iter__(self):
        # allows ``value, err = oscillatory_integral(...)``
        yield self.value
        yield self.error


def _gk_batch(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        fx = np.where(np.isfinite(fx), fx, 0.0)
    rk = half * (fx @ _WK)
    rg = half * (fx @ _WG15)
    # QUADPACK error heuristic
    mean = rk / np.where(half != 0, 2.0 * half, 1.0)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _WK)
    err = np.abs(rk - rg)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc != 0) & (err != 0),
            resasc * np.minimum(1.0, (200.0 * err / np.where(resasc != 0, resasc, 1.0)) ** 1.5),
            err,
        )
    resabs = np.abs(half) * (np.abs(fx) @ _WK)
    floor = 50.0 * np.finfo(float).eps * resabs
    return rk, np.maximum(scaled, floor)


def _geometric_split(lo, hi):
    """
    Split intervals spanning many scales at geometric points (factor 4).

    Bisection alone misses structure of ``f`` far below the width of the
    interval (e.g. a spectral bump near 1 inside ``[1, 1e4]``): all 15 nodes
    land where ``f`` is negligible and the estimate "converges" to zero.
    Intervals starting at 0 are split down to ``hi * 4**-20``.
    """
    out_lo, out_hi, owner = [], [], []
    for i, (a, b) in enumerate(zip(lo, hi)):
        if a > 0 and b / a > 16:
            k = int(math.ceil(math.log(b / a) / math.log(4.0)))
            pts = np.geomspace(a, b, k + 1)
        elif a == 0 and b > 0:
            pts = np.concatenate([[0.0], b * 4.0 ** -np.arange(20, -1, -1)])
        else:
            pts = np.array([a, b])
        out_lo.append(pts[:-1])
        out_hi.append(pts[1:])
        owner.append(np.full(pts.size - 1, i))
    return np.concatenate(out_lo), np.concatenate(out_hi), np.concatenate(owner)


def gauss_kronrod(f, edges, tol=DEFAULT_TOL, rtol=DEFAULT_RTOL, max_evals=2_000_000):
    """
    Adaptive Gauss-Kronrod (7, 15) over consecutive intervals of ``edges``.

    Parameters
    ----------
    f : callable
        Vectorised integrand, ``f(ndarray) -> ndarray``.
    edges : array_like
        Increasing finite breakpoints; intervals are ``edges[i]..edges[i+1]``.
    tol, rtol : float
        Global absolute / relative tolerance on the total.

    Returns
    -------
    values, errors : ndarray
        Integral and error estimate per initial interval.
    converged : bool
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise DomainError("need at least two edges")
    if np.any(np.diff(edges) < 0):
        raise DomainError("edges must be nondecreasing")
    m = edges.size - 1
    lo, hi, owner = _geometric_split(edges[:-1], edges[1:])
    done_val = np.zeros(m)
    done_err = np.zeros(m)
    evals = 0
    converged = True
    while lo.size:
        val, err = _gk_batch(f, lo, hi)
        evals += 15 * lo.size
        total = done_val.sum() + val.sum()
        target = max(tol, rtol * abs(total))
        total_err = done_err.sum() + err.sum()
        width = hi - lo
        tiny = width <= 1e-13 * np.maximum(np.abs(lo), np.abs(hi)) + 1e-300
        if total_err <= target or evals > max_evals:
            if total_err > target:
                converged = False
            np.add.at(done_val, owner, val)
            np.add.at(done_err, owner, err)
            break
        # freeze intervals that already satisfy their share of the budget
        share = target / max(val.size, 1)
        split = (err > 0.5 * share) & ~tiny
        if not np.any(split):
            split = (err >= err.max()) & ~tiny
            if not np.any(split):
                np.add.at(done_val, owner, val)
                np.add.at(done_err, owner, err)
                converged = total_err <= 10 * target
                break
        keep = ~split
        np.add.at(done_val, owner[keep], val[keep])
        np.add.at(done_err, owner[keep], err[keep])
        mid = 0.5 * (lo[split] + hi[split])
        lo = np.concatenate([lo[split], mid])
        hi = np.concatenate([mid, hi[split]])
        owner = np.concatenate([owner[split], owner[split]])
    return done_val, done_err, converged


def wynn_epsilon(s):
    """
    Wynn's epsilon algorithm (Shanks transform) on partial sums ``s``.

    Returns
    -------
    estimate : float
        Entry of the highest even column built from all of ``s``.
    error : float
        Distance to the same-column estimate built without the last term
        (falls back to the last raw difference for short sequences).
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    if n == 0:
        raise DomainError("empty sequence")
    if n < 3:
        return float(s[-1]), float(abs(s[-1] - s[0])) if n > 1 else math.inf

    def table(seq):
        prev = np.zeros(seq.size + 1)
        cur = seq.copy()
        best = [cur[-1]]
        k = 0
        while cur.size > 1:
            d = np.diff(cur)
            with np.errstate(divide="ignore"):
                inv = np.where(d != 0, 1.0 / np.where(d != 0, d, 1.0), np.inf)
            nxt = prev[1:cur.size] + inv
            prev, cur = cur, nxt
            k += 1
            if not np.all(np.isfinite(cur)):
                break
            if k % 2 == 0:
                best.append(cur[-1])
        return best

    full = table(s)
    part = table(s[:-1])
    est = full[-1]
    ref = part[min(len(part), len(full)) - 1]
    err = abs(est - ref)
    if len(full) > 1:
        err = max(err, abs(full[-1] - full[-2]) * 1e-3)
    return float(est), float(err)


def _bessel_phase(nu, z):
    # exact modulus-phase angle, unwrapped via asymptotic phase
    j, y = sp.jv(nu, z), sp.yv(nu, z)
    th = np.arctan2(y, j)
    approx = z - (0.5 * nu + 0.25) * math.pi + (4 * nu * nu - 1) / (8 * z)
    return th + 2 * math.pi * np.round((approx - th) / (2 * math.pi)), j, y


@dataclass(frozen=True)
class BesselKernel:
    r"""
    Kernel ``K(z) = c * z**q * Lambda_a(z) * Lambda_b(z)``.

    ``b=None`` gives a single normalised Bessel factor.  ``Lambda`` is
    :func:`~lrd_spectra.specfun.normalized_bessel`, so ``K`` is entire and
    the origin needs no special care.
    """

    a: float
    b: float | None = None
    q: float = 0.0
    c: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = self.c * np.atleast_1d(normalized_bessel(self.a, z))
        if self.b is not None:
            out = out * np.atleast_1d(normalized_bessel(self.b, z))
        if self.q:
            out = out * np.abs(z) ** self.q
        return out.reshape(z.shape)

    @property
    def is_product(self):
        return self.b is not None

    def derivative(self):
        """``K'`` for q = 0, itself a sum of kernels (returned as a list)."""
        if self.q != 0:
            raise DomainError("derivative only implemented for q = 0")
        da = BesselKernel(self.a + 1, None, 1.0, -self.c / (2 * (self.a + 1)))
        if self.b is None:
            return [da]
        return [
            BesselKernel(self.a + 1, self.b, 1.0, -self.c / (2 * (self.a + 1))),
            BesselKernel(self.a, self.b + 1, 1.0, -self.c / (2 * (self.b + 1))),
        ]

    # -- tail decomposition -------------------------------------------------
    def _scale(self, nu):
        return math.gamma(nu + 1.0) * 2.0**nu

    def _jy_factor(self, z):
        # c z^q z^{-a} [z^{-b}] times Gamma/2^ power constants
        p = self.q - self.a - (self.b if self.b is not None else 0.0)
        k = self.c * self._scale(self.a)
        if self.b is not None:
            k *= self._scale(self.b)
        return k * z**p

    def mean_part(self, z):
        """Non-oscillating half ``(J_a J_b + Y_a Y_b)/2`` of a product kernel."""
        z = np.asarray(z, dtype=float)
        jj = sp.jv(self.a, z) * sp.jv(self.b, z) + sp.yv(self.a, z) * sp.yv(self.b, z)
        return self._jy_factor(z) * 0.5 * jj

    def osc_part(self, z):
        """Oscillating half ``(J_a J_b - Y_a Y_b)/2`` of a product kernel."""
        z = np.asarray(z, dtype=float)
        jj = sp.jv(self.a, z) * sp.jv(self.b, z) - sp.yv(self.a, z) * sp.yv(self.b, z)
        return self._jy_factor(z) * 0.5 * jj

    def tail_start(self):
        """Argument beyond which the product-phase Newton iteration is reliable."""
        nu = max(abs(self.a), abs(self.b if self.b is not None else 0.0))
        return max(30.0, 3.0 * nu * nu)

    def nodes(self, z_from, count):
        """``count`` consecutive oscillation nodes of the kernel beyond ``z_from``."""
        if self.b is None:
            # first zero index beyond z_from from McMahon, then exact zeros
            nu = self.a
            k0 = max(1, int((z_from / math.pi) - 0.5 * nu - 1))
            ks = np.arange(k0, k0 + count + 8)
            z = np.atleast_1d(bessel_j_zero(nu, ks))
            z = z[z > z_from]
            return z[:count]
        return _product_nodes(self.a, self.b, z_from, count)


def _product_nodes(a, b, z_from, count):
    # zeros of cos(theta_a + theta_b), i.e. theta_a + theta_b = pi/2 + k pi
    off = (0.5 * a + 0.25 + 0.5 * b + 0.25) * math.pi
    k0 = math.ceil((2 * z_from - off - 0.5 * math.pi) / math.pi) - 2
    ks = np.arange(k0, k0 + count + 8, dtype=float)
    target = 0.5 * math.pi + ks * math.pi
    z = 0.5 * (target + off)
    keep = z > 0  # nonpositive guesses would only produce NaN nodes below z_from
    z, target = z[keep], target[keep]
    for _ in range(30):
        ta, ja, ya = _bessel_phase(a, z)
        tb, jb, yb = _bessel_phase(b, z)
        dth = 2.0 / (math.pi * z) * (1.0 / (ja * ja + ya * ya) + 1.0 / (jb * jb + yb * yb))
        step = (ta + tb - target) / dth
        z = z - step
        if np.all(np.abs(step) < 1e-14 * z):
            break
    z = z[z > z_from]
    return z[:count]


def _tail_contracting(g, t_end, width):
    """
    Probe whether panel magnitudes keep shrinking far beyond ``t_end``.

    Compares the mean of ``|g|`` over a few oscillation periods at ``t_end``
    with the same quantity one, two and three decades further out.  The
    early panels alone can mislead when the amplitude of ``g`` is still
    rising (slowly varying prefactors) or when the series only converges
    in the Abel sense, which epsilon extrapolation would happily "sum".
    """
    span = 6.0 * width
    mags = []
    for T in (t_end, 10 * t_end, 100 * t_end, 1000 * t_end):
        v, _, _ = gauss_kronrod(lambda t: np.abs(g(t)), np.linspace(T, T + span, 13), tol=0.0,
                                rtol=1e-3, max_evals=20_000)
        mags.append(v.sum())
    mags = np.array(mags)
    if mags[0] == 0.0:
        return True
    return bool(mags[-1] < 0.9 * mags[0] and mags[-1] <= mags[1] * 1.05)


def _panel_sum(g, nodes, tol):
    vals, _, ok = gauss_kronrod(g, nodes, tol=tol)
    return vals, ok


def _algebraic_tail_fit(partial, ends):
    """
    Limit of partial sums that approach it like ``c1/z + c2/z^2``.

    Epsilon extrapolation stalls on such logarithmic convergence (a
    non-oscillating ``1/t^2`` tail, e.g. when ``f`` oscillates at the kernel
    frequency).  Averaging neighbours cancels the alternating part; a least
    squares fit in ``(1, 1/z, 1/z^2)`` over the last half and the last three
    quarters of the panels gives the estimate and its spread.
    """
    if partial.size < 40:
        return float(partial[-1]), math.inf
    avg = 0.5 * (partial[1:] + partial[:-1])
    z = np.sqrt(ends[1:] * ends[:-1])
    fits = []
    for lo in (avg.size // 4, avg.size // 2):
        A = np.column_stack([np.ones(avg.size - lo), 1 / z[lo:], 1 / z[lo:] ** 2])
        coef, *_ = np.linalg.lstsq(A, avg[lo:], rcond=None)
        fits.append(coef[0])
    return float(fits[1]), float(abs(fits[1] - fits[0]))


def _accelerated_tail(g, kernel_nodes, start, tol, max_panels, batch=40, rtol=0.0):
    """Integral of ``g`` over [start, inf) by panels at ``kernel_nodes`` plus Wynn."""
    z = np.concatenate([[start], kernel_nodes(start, batch)])
    panels = []
    ends = []
    est_hist = []
    total_panels = 0
    while True:
        scale = abs(est_hist[-1]) if est_hist else 0.0
        vals, _ = _panel_sum(g, z, max(tol, rtol * scale) * 1e-2 / batch)
        panels.extend(vals.tolist())
        ends.extend(z[1:].tolist())
        total_panels = len(panels)
        s = np.cumsum(panels)
        target = max(tol, rtol * abs(s[-1]))
        # raw convergence: tail panels negligible
        tail_mag = np.abs(panels[-6:]).max()
        if tail_mag < 1e-3 * target:
            return QuadResult(float(s[-1]), float(tail_mag), True, total_panels)
        window = s[max(0, s.size - 60):]
        est, err = wynn_epsilon(window)
        est_hist.append(est)
        if len(est_hist) > 1:
            err = max(err, abs(est_hist[-1] - est_hist[-2]))
        if err < max(tol, rtol * abs(est)) and len(est_hist) > 1:
            # epsilon also "sums" divergent alternating series; refuse that
            if not _tail_contracting(g, z[-1], z[-1] - z[-2]):
                return QuadResult(est, err, False, total_panels, divergent=True)
            return QuadResult(est, err, True, total_panels)
        if total_panels >= max_panels:
            divergent = not _tail_contracting(g, z[-1], z[-1] - z[-2])
            if not divergent:
                alt, alt_err = _algebraic_tail_fit(s, np.asarray(ends))
                if alt_err < err:
                    est, err = alt, alt_err
                if err < max(tol, rtol * abs(est)):
                    return QuadResult(est, err, True, total_panels)
            return QuadResult(est, err, False, total_panels, divergent=divergent)
        nxt = kernel_nodes(z[-1], batch)
        z = np.concatenate([[z[-1]], nxt])


def integrate_against_kernel(
    f,
    kernel,
    omega,
    a=0.0,
    points=(),
    upper=None,
    tol=DEFAULT_TOL,
    max_panels=200,
    f_mean=None,
    rtol=0.0,
):
    r"""
    Integrate ``f(t) * kernel(omega * t)`` over ``[a, upper]`` (``upper=None``: to infinity).

    Parameters
    ----------
    f : callable
        Vectorised, smooth between ``points``.
    kernel : BesselKernel
    omega : float > 0
    points : sequence of float
        Interior breakpoints of ``f``.
    f_mean : callable, optional
        Used for the non-oscillating half of a product kernel; defaults to
        ``f``.  Lets callers pass a cheaper or smoother representative.
    rtol : float
        Relative tolerance, measured against the head of the integral.  The
        effective tolerance is ``max(tol, rtol * |head|)``.

    Returns
    -------
    QuadResult
    """
    if omega <= 0:
        raise DomainError("omega must be positive")
    pts = sorted(p for p in points if p > a and (upper is None or p < upper))
    z_split = kernel.tail_start() if kernel.is_product else 0.0
    last_pt = max([a] + pts)
    if upper is not None:
        # finite range: break at kernel nodes for accuracy, no extrapolation
        zs = kernel.nodes(a * omega, max(0, int((upper - a) * omega / math.pi) + 4)) / omega
        zs = zs[(zs > a) & (zs < upper)]
        edges = np.unique(np.concatenate([[a], zs, pts, [upper]]))
        vals, errs, ok = gauss_kronrod(lambda t: f(t) * kernel(omega * t), edges, tol=tol,
                                       rtol=max(rtol, DEFAULT_RTOL))
        return QuadResult(float(vals.sum()), float(errs.sum()), ok, edges.size - 1)

    t0 = max(last_pt, z_split / omega)
    # head: [a, t0] with kernel nodes as breakpoints
    head_val, head_err, head_ok = 0.0, 0.0, True
    if t0 > a:
        n_nodes = int((t0 - a) * omega / math.pi) + 4
        zs = kernel.nodes(a * omega, n_nodes) / omega if n_nodes < 20000 else np.array([])
        zs = zs[(zs > a) & (zs < t0)]
        edges = np.unique(np.concatenate([[a], zs, pts, [t0]]))
        vals, errs, head_ok = gauss_kronrod(lambda t: f(t) * kernel(omega * t), edges,
                                            tol=tol * 0.1, rtol=max(rtol * 0.1, DEFAULT_RTOL))
        head_val, head_err = float(vals.sum()), float(errs.sum())
    tol = max(tol, rtol * abs(head_val))

    if not kernel.is_product:
        tail = _accelerated_tail(
            lambda t: f(t) * kernel(omega * t),
            lambda s, k: kernel.nodes(s * omega, k) / omega,
            t0,
            tol * 0.5,
            max_panels,
            rtol=rtol * 0.5,
        )
        total = head_val + tail.value
        return QuadResult(total, head_err + tail.error, head_ok and tail.converged,
                          tail.panels, tail.divergent)

    # product kernel: smooth mean part + oscillating part
    fm = f if f_mean is None else f_mean
    mean = _smooth_tail(lambda t: fm(t) * kernel.mean_part(omega * t), t0, tol * 0.25, rtol * 0.25)
    tol = max(tol, rtol * abs(head_val + mean.value))
    tail = _accelerated_tail(
        lambda t: f(t) * kernel.osc_part(omega * t),
        lambda s, k: kernel.nodes(s * omega, k) / omega,
        t0,
        tol * 0.25,
        max_panels,
        rtol=rtol * 0.25,
    )
    total = head_val + mean.value + tail.value
    return QuadResult(
        total,
        head_err + mean.error + tail.error,
        head_ok and mean.converged and tail.converged,
        tail.panels,
        tail.divergent or mean.divergent,
    )


def _smooth_tail(g, t0, tol, rtol=DEFAULT_RTOL):
    """Integral of a smooth, non-oscillating ``g`` over [t0, inf) via t = t0 / s."""
    if t0 <= 0:
        raise DomainError("smooth tail requires t0 > 0")

    def h(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        ok = s > 0
        t = t0 / s[ok]
        out[ok] = g(t) * t0 / s[ok] ** 2
        return out

    edges = np.array([0.0, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0])
    vals, errs, ok = gauss_kronrod(h, edges, tol=tol, rtol=max(rtol, DEFAULT_RTOL))
    return QuadResult(float(vals.sum()), float(errs.sum()), ok)


def oscillatory_integral(f, nu, omega, tol=DEFAULT_TOL, a=0.0, points=(), max_panels=200):
    r"""
    :math:`\int_a^\infty f(t) J_\nu(\omega t)\,dt` by panels between zeros of ``J_nu``.

    Partial sums over consecutive zero-to-zero panels are extrapolated with
    Wynn's epsilon algorithm.  On non-convergence the best estimate is
    returned with ``converged=False`` and a :class:`NonConvergenceWarning`.

    Examples
    --------
    >>> r = oscillatory_integral(lambda t: np.exp(-t), 0, 1.0)
    >>> round(r.value, 12)
    0.707106781187
    """
    if nu < -0.5:
        raise DomainError("nu must be >= -1/2")
    if omega <= 0:
        raise DomainError("omega must be positive")
    # J_nu(z) = z^nu Lambda_nu(z) / (2^nu Gamma(nu+1))
    kern = BesselKernel(nu, None, nu, 1.0 / (2.0**nu * math.gamma(nu + 1.0)))
    res = integrate_against_kernel(f, kern, omega, a=a, points=points, tol=tol,
                                   max_panels=max_panels)
    if not res.converged:
        warnings.warn(
            f"oscillatory integral did not converge after {res.panels} panels "
            f"(error estimate {res.error:.2e})",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return res
