"""Constant slope surface in R^3 built over a great circle of the sphere.

R^3 minus the origin is the warped product (0, inf) x_rho S^2(sin theta)
with rho(t) = t / sin(theta).  The surface r(u, v) is compared with the
graph of h o d, and the angle between its normal and the position vector
is measured by finite differences.
"""
import math

import numpy as np

from cahs import (AnalyticDistance, GraphSurface, MunteanuSurface, TransnormalBuilder,
                  TransnormalField)

theta = 0.7
e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
alpha = lambda v: math.cos(v) * e1 + math.sin(v) * e2
dalpha = lambda v: -math.sin(v) * e1 + math.cos(v) * e2

surf = MunteanuSurface(theta, alpha, dalpha)
field = TransnormalField(TransnormalBuilder(surf.ambient.profile, theta=theta, s0=1.0),
                         AnalyticDistance(surf.seed(), surf.ambient.base), side="both")
graph = GraphSurface(field, surf.ambient)

f_err = ang_err = pos_err = 0.0
for u in np.linspace(0.5, 3.0, 12):
    for v in np.linspace(0, 2 * math.pi, 12, endpoint=False):
        x = surf.position((u, v))
        f_err = max(f_err, abs(field.value(x[1:]) - u))
        pos_err = max(pos_err, np.max(np.abs(graph.position(x[1:]) - x)))
        ang_err = max(ang_err, abs(surf.radial_angle(u, v) - theta))

print(f"max |f(phi(u,v)) - u|      {f_err:.2e}")
print(f"graph vs parametrization   {pos_err:.2e}")
print(f"radial angle error         {ang_err:.2e}")
print("r(1, 0) =", surf.r(1.0, 0.0), " sin(theta) alpha(0) =", math.sin(theta) * alpha(0.0))
