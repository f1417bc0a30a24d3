"""Level-set curvature, parallel evolution and the minimal classifier in R^3."""
import math

import numpy as np

from cahs import (CylinderSurface, EuclideanFlat, GraphSurface, Hyperplane, ScalarField,
                  WarpedProduct, WarpingProfile, classify_minimal_ca, harmonic_eikonal_linearity,
                  level_set_mean_curvature, parallel_curvature_evolution)
from cahs.verify import helicoid_surface

# curvature of offset circles, measured on the grid and predicted by the evolution
h = 1 / 64
ax = 0.5 + h * np.arange(65)
X, Y = np.meshgrid(ax, ax, indexing="ij")
r = np.hypot(X, Y)
geo = level_set_mean_curvature(r, h)
pred = parallel_curvature_evolution([1.0], 0.0, 1 - r[32, 32])[0]
print(f"|H| at r = {r[32, 32]:.4f}: {abs(geo.H[32, 32]):.6f}, offset prediction {pred:.6f}")

for name, f in (("3x + 4y", 3 * X + 4 * Y), ("|x|", r), ("x^2 - y^2", X ** 2 - Y ** 2)):
    v = harmonic_eikonal_linearity(f, h, origin=(0.5, 0.5))
    print(f"{name:10s} harmonic={v.is_harmonic!s:5s} eikonal={v.is_eikonal!s:5s} "
          f"linear={v.is_linear}")

flat = WarpedProduct(WarpingProfile.constant(1.0), EuclideanFlat(2))
plane = GraphSurface(ScalarField(lambda p: p[..., 0] + p[..., 1], lambda p: np.ones(p.shape)), flat)
cyl = CylinderSurface(Hyperplane(np.array([1.0, 0.0]), 0.0), flat)
rng = np.random.default_rng(0)
print("plane:   ", classify_minimal_ca(plane, rng.uniform(-1, 1, (6, 2))).verdict)
print("cylinder:", classify_minimal_ca(cyl, np.array([[0.0, 0.0, 0.3], [1.0, 0.0, -0.5]])).verdict)
c = classify_minimal_ca(helicoid_surface(), np.array([[u, v] for u in (0.3, 1.0) for v in (0.0, 1.0)]))
print("helicoid:", c.verdict, f"(theta spread {c.theta_spread:.3f}, max |H| {c.max_mean_curvature:.1e})")
print("theta of the plane graph:", round(math.atan(math.sqrt(2)), 6))
