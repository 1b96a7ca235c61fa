"""
lrd_spectra: spectral theory of long-range dependent isotropic random fields.

Covariance/spectrum transforms in any dimension, variances of ball and
sphere averages, asymptotic constants with numerical verifiers for the
Abelian/Tauberian pairs, a catalogue of worked models, radially directional
fields, and a CSV command-line front end.
"""

from . import asymptotics, directional, figures, functionals, models, quadrature, specfun, spectra
from .asymptotics import (
    THEOREMS,
    AsymptoticLaw,
    MatuszewskaEstimate,
    TheoremReport,
    ball_variance_constant,
    bingham_constant,
    c1,
    c2,
    c3,
    c4,
    estimate_tail_exponent,
    matuszewska_indices,
    or_ratio_trace,
    slow_variation_test,
    verify_theorem_pair,
)
from .directional import DirectionalDensity, HarmonicCoefficientMap, check_theorem11, cov_from_directional
from .errors import *  # noqa: F401,F403
from .functionals import var_ball, var_ball_bruteforce, var_sphere, var_sphere_bruteforce
from .models import MODEL_IDS, ModelSpec, catalog, get_model, model_eval
from .spectra import (
    CovarianceModel,
    DensityPiece,
    SpectralMeasure,
    cov_from_spectrum,
    density_from_cov,
    spectrum_from_cov,
)

__version__ = "0.1.0"
