"""Constant angle surfaces over a closed convex plane curve, in R x_rho R^2.

The curve has radius of curvature g(v) = 2 + 0.5 cos 2v.  For rho = 1/t
and rho = 1 the graph surfaces satisfy f = u sin(theta), and the
vertical-plane cylinders x = G(t) keep the angle theta.
"""
import math

import numpy as np

from cahs import (AnalyticDistance, DillenSurface, EuclideanFlat, TransnormalBuilder,
                  TransnormalField, TrigPolynomial, WarpingProfile, dillen_cylinder_G,
                  reciprocal_rho_integral)
from cahs.hypersurface import dillen_cylinder_surface

theta = 0.6
g = TrigPolynomial([2.0, 0.0, 0.5])
print("curve closes:", g.closes())

for name, prof, s_low in (("rho = 1/t", WarpingProfile.reciprocal(), 1.0),
                          ("rho = 1", WarpingProfile.constant(1.0), 0.0)):
    surf = DillenSurface(theta, prof, g, s_lower=s_low)
    field = TransnormalField(TransnormalBuilder(prof, theta=theta, s0=s_low),
                             AnalyticDistance(surf.seed(), EuclideanFlat(2)), side="both")
    err = max(abs(field.value(surf.position((u, v))[1:]) - u * math.sin(theta))
              for u in np.linspace(s_low + 0.1, s_low + 1.5, 8) / math.sin(theta)
              for v in np.linspace(0, 2 * math.pi, 8, endpoint=False))
    ts = np.linspace(s_low + 0.1, s_low + 2.0, 5)
    G = [dillen_cylinder_G(theta, prof, t, s_low) for t in ts]
    G_ref = [reciprocal_rho_integral(prof, math.tan(theta), s_low, t) for t in ts]
    cyl = dillen_cylinder_surface(theta, prof, s_low)
    th = [cyl.sample(np.array([t, y])).theta for t in ts for y in (-1.0, 0.0, 1.0)]
    print(f"{name:10s} graph |f - u sin theta| {err:.1e}   "
          f"|G - h^-1| {np.max(np.abs(np.subtract(G, G_ref))):.1e}   "
          f"cylinder angle spread {np.ptp(th):.1e}")
