"""
Slow variation versus oscillation.

For the truncated quadratic spectrum r^2 B(r) = 2 (1 - cos r) never settles,
so no covariance-side regular variation exists even though G(l)/l^2 = 1.
For the sqrt-oscillating density the density envelope oscillates, yet the
sphere variance l_3(r) r^{-7/2} converges.
"""
import numpy as np

from lrd_spectra import models
from lrd_spectra.asymptotics import slow_variation_test

trunc = models.get_model("truncated_quadratic", n=3, a=1.0)
sq = models.get_model("sqrt_oscillatory")

cases = {
    "r^2 B(r), truncated quadratic": lambda r: r * r * float(trunc.covariance(r)),
    "density envelope at 0 (in 1/lambda)": lambda u: np.exp(-50 / u) + np.sin(2 * u) ** 2,
    "r^(-7/2) l_3(r), sqrt-oscillating": lambda r: r**-3.5 * sq.closed["l_n"](r),
}
for name, h in cases.items():
    ok, dev, _ = slow_variation_test(h)
    print(f"{name:40s} slowly varying: {str(ok):5s}  worst deviation {dev:.3g}")

print(f"\nlimit of r^(-7/2) l_3(r): {sq.expected['l3_limit']:.6f}")
for r in (1e2, 1e4, 1e6):
    print(f"  r = {r:8.0e}: {r**-3.5 * sq.closed['l_n'](r):.6f}")
