import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrd_spectra import models
from lrd_spectra.errors import DomainError, IntegrabilityError
from lrd_spectra.spectra import (
    CovarianceModel,
    DensityPiece,
    SpectralMeasure,
    cov_from_spectrum,
    density_from_cov,
    density_weight,
    spectrum_from_cov,
)


@pytest.fixture(scope="module")
def trunc():
    return models.get_model("truncated_quadratic", n=3, a=1.0)


def test_exp_gamma_covariance_at_one():
    m = models.get_model("exp_gamma").spectrum
    assert cov_from_spectrum(m, 1.0) == pytest.approx(0.5, abs=1e-10)


def test_zero_lag_is_total_mass():
    for spec in models.catalog():
        if spec.spectrum is not None:
            assert cov_from_spectrum(spec.spectrum, 0.0) == spec.spectrum.total_mass


def test_truncated_quadratic_covariance(trunc):
    assert cov_from_spectrum(trunc.spectrum, 2.0) == pytest.approx(2 * (1 - math.cos(2)) / 4, abs=1e-10)


def test_atoms_are_exact():
    m = SpectralMeasure.from_atoms(3, [(2.0, 0.5), (0.0, 0.25)])
    r = 1.3
    assert cov_from_spectrum(m, r) == pytest.approx(0.5 * math.sin(2 * r) / (2 * r) + 0.25, abs=1e-15)


def test_inversion_of_truncated_quadratic(trunc):
    c = trunc.covariance_model()
    assert spectrum_from_cov(c, 0.5) == pytest.approx(0.25, abs=1e-7)


def test_inversion_against_density_quadrature():
    # Cauchy covariance, n = 3, kappa = 2; oracle integrates the closed density
    c = CovarianceModel(3, lambda r: (1 + np.asarray(r) ** 2) ** -1.0, 1.0)
    spec = models.get_model("cauchy_bessel", n=3, kappa=2.0)
    for lam in (0.3, 1.0, 3.0):
        assert spectrum_from_cov(c, lam) == pytest.approx(spec.spectrum.cdf(lam), abs=1e-7)
        assert spectrum_from_cov(c, lam) == pytest.approx(1 - math.exp(-lam) * (1 + lam), abs=1e-7)


def test_inversion_reaches_total_mass():
    c = models.get_model("exp_gamma").covariance_model()
    assert spectrum_from_cov(c, 60.0) == pytest.approx(1.0, abs=1e-7)


def test_round_trip_and_monotone():
    spec = models.get_model("exp_gamma")
    c = spec.covariance_model()
    lam = np.geomspace(0.05, 30, 20)
    got = spectrum_from_cov(c, lam)
    np.testing.assert_allclose(got, spec.closed["G"](lam), atol=1e-6)
    assert np.all(np.diff(got) >= -1e-6)


def test_cauchy_bessel_density_at_one():
    c = CovarianceModel(6, lambda r: (1 + np.asarray(r) ** 2) ** -2.0, 1.0)
    # K_1(1) / (pi^3 2^4 Gamma(2)), mpmath oracle
    assert density_from_cov(c, 1.0) == pytest.approx(0.00121327698501861514, rel=1e-7)


def test_convolution_semigroup():
    # B_2^2 = B_4, so the density of the square is g_4
    c = CovarianceModel(3, lambda r: ((1 + np.asarray(r) ** 2) ** -1.0) ** 2, 1.0)
    lam = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    want = [models.model_eval("cauchy_bessel", "g", x, n=3, kappa=4.0) for x in lam]
    np.testing.assert_allclose(density_from_cov(c, lam), want, atol=1e-6)


def test_one_dimensional_cosine_transform():
    c = CovarianceModel(1, lambda r: np.exp(-np.asarray(r) ** 2 / 2), 1.0)
    assert density_from_cov(c, 1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-10)


def test_long_range_density_conditionally_convergent():
    # r B(r) -> 0: the Linnik density is still recovered
    c = CovarianceModel(3, lambda r: (1 + np.asarray(r)) ** -2.0, 1.0)
    assert density_from_cov(c, 1.0) == pytest.approx(models.linnik_density_closed(1.0), rel=1e-8)


def test_non_integrable_covariance_is_signalled():
    c = CovarianceModel(3, lambda r: (1 + np.asarray(r)) ** -0.5, 1.0)
    with pytest.raises(IntegrabilityError):
        density_from_cov(c, 1.0)


def test_density_weight_matches_definition():
    lam = 2.0
    for n in (1, 2, 3, 6):
        want = 2 * math.pi ** (n / 2) / math.gamma(n / 2) * lam ** (n - 1)
        assert density_weight(n, lam) == pytest.approx(want, rel=1e-14)


def test_invalid_pieces():
    with pytest.raises(DomainError):
        DensityPiece(1.0, 0.5, lambda x: x)
    with pytest.raises(DomainError):
        SpectralMeasure.from_pieces(3, [])


def test_radial_density_measure_mass():
    g = lambda l: np.exp(-np.asarray(l)) / (4 * math.pi)  # noqa: E731
    m = SpectralMeasure.from_radial_density(3, g)
    # int 4 pi l^2 g dl = 2
    assert m.total_mass == pytest.approx(2.0, rel=1e-10)
    assert m.cdf(np.inf) == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("model_id", [i for i in models.MODEL_IDS])
def test_gram_matrix_positive(model_id):
    spec = models.get_model(model_id)
    pts = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
    lag = np.abs(pts[:, None] - pts[None, :])
    if spec.is_directional:
        G = np.vectorize(lambda r: float(spec.covariance(r, 0.0)))(lag)
    else:
        G = np.vectorize(lambda r: float(spec.covariance(r)))(lag)
    assert np.linalg.eigvalsh(G).min() >= -1e-8


@pytest.mark.parametrize("model_id", [i for i in models.MODEL_IDS if not i.startswith("directional")])
def test_covariance_bounded_by_variance(model_id):
    spec = models.get_model(model_id)
    r = np.geomspace(1e-3, 1e3, 60)
    B0 = float(spec.covariance(0.0))
    assert np.all(np.abs(spec.covariance(r)) <= B0 * (1 + 1e-10))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 40.0))
def test_covariance_closed_vs_transform_exp_gamma(r):
    spec = models.get_model("exp_gamma")
    assert cov_from_spectrum(spec.spectrum, r) == pytest.approx(float(spec.covariance(r)), abs=1e-8)
