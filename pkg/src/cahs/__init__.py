"""Constant angle hypersurfaces in warped products ``I x_rho P``.

Graphs of transnormal functions ``f = h o d`` (``|grad f| = C rho(f)``) make a
constant angle ``arctan C`` with ``d/dt``.  The package builds them from a
warping profile and a seed hypersurface of the base, and measures their
extrinsic geometry numerically.
"""
from .base_manifold import (AnalyticDistance, EuclideanFlat, Grid, GridDistance, Hyperplane,
                            PlaneCurve, RoundSphere2, SphereShell, SphericalCurve,
                            distance_analytic, distance_value, grad_field)
from .errors import (DomainError, FocalPointError, InvalidConstantError, OutOfRegionError,
                     RangeError, SingularPointError, StepError, UnsupportedAmbientError)
from .fmm import GridLevelSet, distance_fmm
from .hypersurface import (CylinderSurface, DillenSurface, GraphSurface, MunteanuSurface,
                           ParametrizedSurface, SliceSurface, SurfaceSample, TrigPolynomial,
                           cylinder_sample, dillen_cylinder_G, dillen_parametrize, export_mesh,
                           graph_normal_and_angle, integral_curve_T, munteanu_parametrize,
                           shape_operator_fd, shape_report)
from .transnormal import (ScalarField, TransnormalBuilder, TransnormalField, eval_f, grad_f,
                          invert_h, transnormal_residual)
from .verify import (classify_minimal_ca, harmonic_eikonal_linearity, level_set_mean_curvature,
                     parallel_curvature_evolution)
from .warp import (AmbientVector, Interval, WarpedProduct, WarpingProfile, ambient_dt_derivative,
                   ambient_inner, reciprocal_rho_integral)

__version__ = "0.1.0"
