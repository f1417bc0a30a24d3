"""Transnormal functions from fast-marching distances.

A circle seed is rasterised on grids of decreasing spacing; the built f
keeps |grad f| = C rho(f) and a constant graph angle up to the grid error.
The point-source distance shows first-order convergence.
"""
import math

import numpy as np

from cahs import (GridLevelSet, SphereShell, TransnormalBuilder, TransnormalField, WarpingProfile,
                  distance_fmm, graph_normal_and_angle, transnormal_residual)
from cahs.base_manifold import Grid

builder = TransnormalBuilder(WarpingProfile.constant(1.0), C=1.0, s0=0.0)
rng = np.random.default_rng(0)
print("   n        h   residual  angle dev")
for n in (65, 129, 257):
    grid = Grid.box([-1, -1], [1, 1], n)
    dist = distance_fmm(GridLevelSet.from_analytic(grid, SphereShell(np.zeros(2), 0.5)))
    field = TransnormalField(builder, dist)
    p = rng.uniform(-0.95, 0.95, (4000, 2))
    p = p[dist.is_valid(p)][:1000]
    res = transnormal_residual(field, builder.profile, 1.0, p).max
    _, th = graph_normal_and_angle(field, builder.profile, p)
    print(f"{n:4d} {grid.h:8.5f} {res:10.4f} {np.max(np.abs(th - math.pi / 4)):10.4f}")

hs, errs = [], []
for n in (65, 129, 257):
    grid = Grid.box([-1, -1], [1, 1], n)
    d = distance_fmm(GridLevelSet.from_point(grid, [0.0, 0.0], 0.1))
    hs.append(grid.h)
    errs.append(np.max(np.abs(d.values - np.linalg.norm(grid.nodes(), axis=-1))))
print("point source errors / h:", np.round(np.divide(errs, hs), 3),
      " slope:", round(float(np.polyfit(np.log(hs), np.log(errs), 1)[0]), 3))
