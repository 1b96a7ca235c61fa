"""
A spectrum in the OR class that is not regularly varying.

The density is built from blocks at powers of T with alternating weights;
the scaled ball variance then alternates between two levels along
lambda_k = T^{2k} and T^{2k+1}, while every ratio stays bounded.
"""
import numpy as np

from lrd_spectra import models
from lrd_spectra.asymptotics import matuszewska_indices, or_ratio_trace

spec = models.get_model("or_construction")
print("parameters:", {k: float(f"{v:.5g}") for k, v in models.or_construction_parameters().items()})

est = matuszewska_indices(lambda u: float(spec.closed["Gprime"](1.0 / u)), lam_grid=np.geomspace(1e2, 1e8, 121))
print(f"Matuszewska bracket of G'(1/.): [{est.lower:.3f}, {est.upper:.3f}]")

out = or_ratio_trace()
lo, hi = out["bounds"]
print("even ratios:", ", ".join(f"{x:.4g}" for x in out["even"]), f"(bound >= {lo:.4g})")
print("odd ratios: ", ", ".join(f"{x:.4g}" for x in out["odd"]), f"(bound <= {hi:.4g})")
print(f"separation {out['separation']:.4g}, guaranteed {out['guaranteed']:.4g}")
