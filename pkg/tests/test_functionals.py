import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrd_spectra import models
from lrd_spectra.errors import DomainError
from lrd_spectra.functionals import (
    ball_volume,
    sphere_area,
    var_ball,
    var_ball_bruteforce,
    var_ball_scaled,
    var_sphere,
    var_sphere_bruteforce,
)
from lrd_spectra.spectra import CovarianceModel, SpectralMeasure

# Double integrals for B(s) = 1/(1+s^2) in three dimensions, reduced to one
# dimension with the distance density of two uniform points (ball: overlap
# volume of two balls, sphere: 2 pi s ds) and evaluated with mpmath at 30 digits.
BALL_ORACLE = {0.5: 0.215479895945554219, 1.0: 9.03715902034516195, 2.0: 275.391788668665318}
SPHERE_ORACLE = {0.5: 6.84108846385711654, 1.0: 63.5380620153586673, 2.0: 447.403118235557271}


def b3_closed(r, a=1.0):
    return 4 * math.pi**2 * (2 * a**4 * r**4 - 2 * a**2 * r**2 + 2 * a * r * math.sin(2 * a * r) - 1
                             + math.cos(2 * a * r)) / a**4


@pytest.fixture(scope="module")
def exp3():
    return models.get_model("exp_gamma", n=3, a=1.0)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_ball_variance_vs_distance_density(exp3, r):
    assert var_ball(exp3.spectrum, r) == pytest.approx(BALL_ORACLE[r], rel=1e-8)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_sphere_variance_vs_distance_density(exp3, r):
    assert var_sphere(exp3.spectrum, r) == pytest.approx(SPHERE_ORACLE[r], rel=1e-8)


def test_truncated_quadratic_closed_form():
    m = models.get_model("truncated_quadratic", n=3, a=1.0).spectrum
    want = 4 * math.pi**2 * (2 * 16 - 8 + 4 * math.sin(4) - 1 + math.cos(4))
    assert var_ball(m, 2.0) == pytest.approx(want, rel=1e-9)
    assert b3_closed(2.0) == pytest.approx(want, rel=1e-15)
    assert models.model_eval("truncated_quadratic", "b_n", 1.0) == pytest.approx(
        4 * math.pi**2 * (2 * math.sin(2) - 1 + math.cos(2)), rel=1e-12)


def test_small_radius_limits(exp3):
    assert var_ball_scaled(exp3.spectrum, 1e-4) == pytest.approx(ball_volume(3) ** 2, rel=1e-6)
    r = 1e-4
    assert var_sphere(exp3.spectrum, r) / r**4 == pytest.approx(sphere_area(3) ** 2, rel=1e-6)


def test_single_atom_sphere_variance():
    lam0, mass, r, n = 1.7, 0.3, 2.2, 4
    m = SpectralMeasure.from_atoms(n, [(lam0, mass)])
    nu = (n - 2) / 2
    from scipy.special import jv

    want = (2 * math.pi) ** n * r ** (2 * (n - 1)) * jv(nu, lam0 * r) ** 2 * (lam0 * r) ** (2 - n) * mass
    assert var_sphere(m, r) == pytest.approx(want, rel=1e-12)


def test_sqrt_oscillatory_sphere_closed_form():
    spec = models.get_model("sqrt_oscillatory")
    assert var_sphere(spec.spectrum, 2.0) == pytest.approx(spec.closed["l_n"](2.0), rel=1e-7)


def test_sphere_needs_two_dimensions():
    with pytest.raises(DomainError):
        var_sphere(SpectralMeasure.from_atoms(1, [(1.0, 1.0)]), 1.0)


def test_ball_needs_positive_radius(exp3):
    with pytest.raises(DomainError):
        var_ball(exp3.spectrum, 0.0)


def test_bruteforce_constant_field():
    c = CovarianceModel(3, lambda r: np.ones_like(np.asarray(r, dtype=float)), 1.0)
    est, se = var_ball_bruteforce(c, 1.3, samples=20_000, seed=1)
    assert est == pytest.approx(ball_volume(3, 1.3) ** 2, rel=1e-12)
    assert se == pytest.approx(0.0, abs=1e-9)


def test_bruteforce_reproducible(exp3):
    c = exp3.covariance_model()
    assert var_ball_bruteforce(c, 1.0, samples=20_000, seed=5) == var_ball_bruteforce(c, 1.0, samples=20_000, seed=5)
    assert var_ball_bruteforce(c, 1.0, samples=20_000, seed=5) != var_ball_bruteforce(c, 1.0, samples=20_000, seed=6)


@pytest.mark.parametrize("model_id,params", [("truncated_quadratic", {"n": 3, "a": 1.0}),
                                             ("cauchy_bessel", {"n": 3, "kappa": 2.0})])
def test_bruteforce_agrees_with_spectral(model_id, params):
    spec = models.get_model(model_id, **params)
    est, se = var_ball_bruteforce(spec.covariance_model(), 1.0, samples=200_000, seed=11)
    assert abs(est - var_ball(spec.spectrum, 1.0)) <= 3 * se


def test_sphere_bruteforce_agrees_with_spectral(exp3):
    est, se = var_sphere_bruteforce(exp3.covariance_model(), 1.0, samples=200_000, seed=3)
    assert abs(est - SPHERE_ORACLE[1.0]) <= 3 * se


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 50.0))
def test_variances_nonnegative(r):
    m = models.get_model("piecewise_oscillatory").spectrum
    assert var_ball(m, r) >= 0
    assert var_sphere(m, r) >= 0


def test_variance_bounded_by_set_measure(exp3):
    for r in (0.3, 1.0, 3.0):
        assert var_ball(exp3.spectrum, r) <= ball_volume(3, r) ** 2 * (1 + 1e-12)
        assert var_sphere(exp3.spectrum, r) <= sphere_area(3, r) ** 2 * (1 + 1e-12)
