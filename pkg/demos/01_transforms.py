"""
Covariance <-> spectrum round trip in three dimensions.

The truncated-quadratic spectrum G(l) = min(l^2, 1) has covariance
B(r) = 2 (1 - cos r) / r^2.  Invert B numerically, then push the measure
through the ball-variance formula and compare with the closed form.
"""
import numpy as np

from lrd_spectra import models
from lrd_spectra.functionals import var_ball
from lrd_spectra.spectra import spectrum_from_cov

spec = models.get_model("truncated_quadratic", n=3, a=1.0)
cov = spec.covariance_model()

print("lambda   G from B      min(l^2, 1)")
for lam in (0.25, 0.5, 0.75, 1.0, 1.5):
    print(f"{lam:6.2f}   {spectrum_from_cov(cov, lam):.10f}  {min(lam * lam, 1.0):.10f}")

print("\nr      b_3 spectral        b_3 closed")
for r in (0.5, 1.0, 2.0, 5.0):
    print(f"{r:4.1f}   {var_ball(spec.spectrum, r):.10e}  {spec.closed['b_n'](r):.10e}")

r = 1e3
print(f"\nb_3(r) / (8 pi^2 r^4) at r = 1e3: {var_ball(spec.spectrum, r) / (8 * np.pi**2 * r**4):.6f}")
