"""
Radially directional fields in three dimensions.

The exponential example has B(r, theta) ~ (7 - 6 cos^2 theta) / r^2 at large
lags and f(rho, beta) ~ (4 + 3 cos^2 beta) / rho near the origin; the two
profiles are linked degree by degree.  Neither profile makes the field
isotropic or geometrically anisotropic.
"""
import math

from lrd_spectra import models
from lrd_spectra.directional import anisotropy_probe, check_theorem11

for mid in ("directional_exp", "directional_truncated"):
    rep = check_theorem11(mid)
    print(f"{mid}: {rep.verdict}")
    for note in rep.notes:
        print("   ", note)

spec = models.get_model("directional_exp")
r = 1e3
print("\ntheta   r^2 B(r, theta) / (7 - 6 cos^2 theta)")
for th in (0.0, math.pi / 6, math.pi / 3, math.pi / 2):
    print(f"{th:5.3f}   {r * r * float(spec.covariance(r, th)) / (7 - 6 * math.cos(th) ** 2):.6f}")

probe = anisotropy_probe(spec.covariance)
print(f"\ndirectionally homogeneous: {probe['directional_homogeneity']}, "
      f"geometrically anisotropic: {probe['anisotropy']}")
