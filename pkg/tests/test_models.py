import math

import numpy as np
import pytest

from lrd_spectra import models
from lrd_spectra.asymptotics import c1, c3
from lrd_spectra.errors import DomainError, UnavailableQuantityError


def test_catalogue_ids_and_order():
    assert [s.id for s in models.catalog()] == list(models.MODEL_IDS)
    assert len(models.MODEL_IDS) == 9


def test_instances_cached_and_frozen():
    a = models.get_model("cauchy_bessel", n=3, kappa=2.0)
    assert models.get_model("cauchy_bessel", n=3, kappa=2.0) is a
    with pytest.raises(TypeError):
        a.params["n"] = 4


def test_unknown_model_and_quantity():
    with pytest.raises(UnavailableQuantityError):
        models.get_model("no_such_model")
    with pytest.raises(UnavailableQuantityError):
        models.model_eval("exp_gamma", "entropy", 1.0)
    with pytest.raises(UnavailableQuantityError):
        models.model_eval("directional_exp", "G", (1.0, 0.0))
    with pytest.raises(DomainError):
        models.get_model("exp_gamma", wobble=2.0)


def test_exp_gamma_small_lag():
    # gamma = 2 case: 1 - B(r) ~ r^2 int mu^2 dG / (2n) = r^2
    r = 1e-3
    assert (1 - float(models.model_eval("exp_gamma", "cov", r))) / r**2 == pytest.approx(1.0, rel=1e-3)


def test_exp_gamma_closed_values():
    assert models.model_eval("exp_gamma", "cov", 3.0) == pytest.approx(0.1, rel=1e-14)
    assert models.model_eval("exp_gamma", "G", 2.0) == pytest.approx(1 - 3 * math.exp(-2), rel=1e-14)


def test_cauchy_expectations():
    spec = models.get_model("cauchy_bessel")
    assert spec.n == 6 and spec.expected["alpha"] == 4.0
    assert models.model_eval(spec, "cov", 3.0) == pytest.approx(0.01, rel=1e-14)


def test_sqrt_oscillatory_limits():
    spec = models.get_model("sqrt_oscillatory")
    r = 1e8
    assert math.sqrt(r) * float(spec.covariance(r)) == pytest.approx(3.0, rel=1e-3)
    assert spec.spectrum.cdf(1e-10) / 1e-5 == pytest.approx(3.0 / c1(3, 0.5), rel=1e-6)
    assert spec.expected["l3_limit"] == pytest.approx(3.0 / c1(3, 0.5) * c3(3, 0.5), rel=1e-14)


def test_or_construction_parameters():
    p = models.or_construction_parameters()
    assert p["T"] > 1 and 0 < p["eps"] < 1
    assert p["A"] < p["B"] and p["delta1"] > 0 and p["delta2"] > 0
    lo, hi = models.get_model("or_construction").expected["ratio_bounds"]
    assert lo > 0 and hi > 0 and hi < lo


def test_or_construction_distribution_consistent():
    spec = models.get_model("or_construction")
    T = spec.params["T"]
    for lam in (T**1.5, T**2.5, T**3.2):
        # G' is the derivative of G
        h = lam * 1e-6
        fd = (spec.closed["G"](lam + h) - spec.closed["G"](lam - h)) / (2 * h)
        assert fd == pytest.approx(spec.closed["Gprime"](lam), rel=1e-5)


_NUMERIC_CASES = [
    (mid, q, x)
    for mid in models.MODEL_IDS
    if not mid.startswith("directional")
    for q in ("cov", "b_n", "l_n")
    if q == "cov" or q in models.get_model(mid).closed
    for x in (0.7, 3.0, 20.0)
    if not (mid == "linnik" and x < 1)
]


@pytest.mark.parametrize("model_id,quantity,x", _NUMERIC_CASES)
def test_closed_form_matches_transform(model_id, quantity, x):
    closed = models.model_eval(model_id, quantity, x)
    numeric = models.model_eval(model_id, quantity, x, numeric=True)
    assert closed == pytest.approx(numeric, rel=1e-9)


@pytest.mark.parametrize("model_id", ["directional_exp", "directional_truncated"])
def test_directional_density_closed_form(model_id):
    spec = models.get_model(model_id)
    for rho in (0.3, 1.0, 2.5):
        for beta in (0.0, 0.7, math.pi / 2, 2.0):
            assert models.model_eval(spec, "f", (rho, beta)) == pytest.approx(
                models.model_eval(spec, "f", (rho, beta), numeric=True), rel=1e-12)


def test_directional_covariance_transform():
    spec = models.get_model("directional_exp")
    for r, th in ((0.5, 0.2), (2.0, 1.1)):
        assert models.model_eval(spec, "cov", (r, th)) == pytest.approx(
            models.model_eval(spec, "cov", (r, th), numeric=True), abs=1e-8)


def test_available_lists_closed_forms():
    assert "b_n" in models.get_model("truncated_quadratic").available()
    assert models.get_model("exp_gamma").available()[0] == "G"


def test_scalar_and_array_covariance():
    spec = models.get_model("or_construction")
    assert np.ndim(spec.covariance(2.0)) == 0
    assert spec.covariance(np.array([1.0, 2.0])).shape == (2,)
