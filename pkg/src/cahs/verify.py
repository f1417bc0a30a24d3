"""Level-set curvature, parallel evolution, the harmonic+eikonal linearity test
and classification of minimal constant angle hypersurfaces in Euclidean space."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .base_manifold import Grid
from .errors import FocalPointError, UnsupportedAmbientError
from .hypersurface import GraphSurface, shape_report

CRITICAL_GRAD = 1e-8


@dataclass
class LevelSetGeometry:
    """Per-node ``|grad f|``, Laplacian and level-set mean curvature.

    ``H`` and ``laplacian`` are NaN on boundary nodes and on masked
    near-critical nodes; ``n_critical`` counts the latter.
    """

    grad_norm: np.ndarray
    laplacian: np.ndarray
    H: np.ndarray
    valid: np.ndarray
    n_critical: int
    h: float


def _interior(shape, width):
    inside = np.zeros(shape, bool)
    inside[tuple(slice(width, s - width) for s in shape)] = True
    return inside


def _stencil_interior(mask):
    """Nodes of ``mask`` whose axis neighbours are all in ``mask``."""
    out = mask & _interior(mask.shape, 1)
    for ax in range(mask.ndim):
        fwd = np.zeros_like(mask)
        bwd = np.zeros_like(mask)
        sl = [slice(None)] * mask.ndim
        sl[ax] = slice(0, -1)
        sr = [slice(None)] * mask.ndim
        sr[ax] = slice(1, None)
        fwd[tuple(sl)] = mask[tuple(sr)]
        bwd[tuple(sr)] = mask[tuple(sl)]
        out &= fwd & bwd
    return out


def laplacian(f, h):
    """Standard ``2n+1``-point Laplacian; NaN on the boundary ring."""
    f = np.asarray(f, float)
    out = np.full(f.shape, np.nan)
    core = tuple(slice(1, -1) for _ in range(f.ndim))
    acc = -2.0 * f.ndim * f[core]
    for ax in range(f.ndim):
        acc = acc + np.roll(f, 1, ax)[core] + np.roll(f, -1, ax)[core]
    out[core] = acc / (h * h)
    return out


def level_set_mean_curvature(f, h, mask=None) -> LevelSetGeometry:
    """``H = -div(grad f / |grad f|)`` by nested second-order central differences.

    The sign follows the orientation ``grad f / |grad f|``: level sets of
    ``f = |x|`` in ``R^n`` get ``H = -(n - 1) / |x|``.
    """
    f = np.asarray(f, float)
    grads = np.gradient(f, h)
    if f.ndim == 1:
        grads = [grads]
    grads = np.array(grads)
    gn = np.sqrt(np.sum(grads * grads, axis=0))
    valid = np.ones(f.shape, bool) if mask is None else np.asarray(mask, bool).copy()
    critical = valid & (gn < CRITICAL_GRAD)
    safe = np.where(gn < CRITICAL_GRAD, 1.0, gn)
    div = np.zeros(f.shape)
    for ax in range(f.ndim):
        div += np.gradient(grads[ax] / safe, h, axis=ax)
    H = -div
    # the nested stencil reaches two nodes out
    usable = valid & ~critical & _interior(f.shape, 2)
    bad = ~valid | critical
    for ax in range(f.ndim):
        for shift in (-2, -1, 1, 2):
            usable &= ~np.roll(bad, shift, ax)
    H = np.where(usable, H, np.nan)
    lap = laplacian(f, h)
    lap = np.where(_stencil_interior(valid) & ~critical, lap, np.nan)
    return LevelSetGeometry(gn, lap, H, usable, int(critical.sum()), float(h))


def parallel_curvature_evolution(lambda0, t0, t):
    """Principal curvatures ``lambda / (1 - (t - t0) lambda)`` of a parallel hypersurface.

    Raises
    ------
    FocalPointError
        When ``(t - t0) lambda_i`` is within 1e-12 of 1; ``index`` names ``i``.
    """
    lam = np.asarray(lambda0, float)
    denom = 1.0 - (t - t0) * lam
    hit = np.flatnonzero(np.abs(denom) <= 1e-12)
    if hit.size:
        raise FocalPointError(f"focal point reached for curvature index {hit[0]}", int(hit[0]))
    return lam / denom


@dataclass
class LinearityVerdict:
    is_harmonic: bool
    is_eikonal: bool
    is_linear: bool
    coefficients: np.ndarray  # (a_1, ..., a_n, b)
    residual: float
    eikonal_constant: float
    max_laplacian: float
    eikonal_deviation: float
    tolerances: dict = field(default_factory=dict)

    def to_dict(self):
        return {"is_harmonic": self.is_harmonic, "is_eikonal": self.is_eikonal,
                "is_linear": self.is_linear, "coefficients": self.coefficients.tolist(),
                "residual": self.residual, "eikonal_constant": self.eikonal_constant,
                "max_laplacian": self.max_laplacian,
                "eikonal_deviation": self.eikonal_deviation, "tolerances": self.tolerances}


def harmonic_eikonal_linearity(f, h, tol_h=None, tol_e=None, tol_lin=None, mask=None,
                               origin=None) -> LinearityVerdict:
    """Test a gridded field for harmonicity, the eikonal property and affineness.

    The Laplacian and ``|grad f|`` are measured with central differences on
    nodes whose whole stencil lies in ``mask``; the affine model is fitted
    by least squares over all masked nodes.  Default tolerances are
    ``10 h^2 * scale`` (``scale`` = largest measured ``|grad f|``) and
    ``1e-6 * diameter``.

    Raises
    ------
    ValueError
        If fewer than ``n + 1`` interior nodes are available.
    """
    f = np.asarray(f, float)
    n = f.ndim
    valid = np.ones(f.shape, bool) if mask is None else np.asarray(mask, bool)
    inner = _stencil_interior(valid)
    if inner.sum() < n + 1:
        raise ValueError("fewer interior nodes than unknowns of the affine fit")
    origin = np.zeros(n) if origin is None else np.asarray(origin, float)
    axes = [origin[k] + h * np.arange(s) for k, s in enumerate(f.shape)]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    diameter = h * math.sqrt(sum((s - 1) ** 2 for s in f.shape))

    grads = np.array(np.gradient(f, h)).reshape(n, *f.shape)
    gn = np.sqrt(np.sum(grads * grads, axis=0))[inner]
    lap = laplacian(f, h)[inner]
    scale = max(float(np.max(gn)), np.finfo(float).tiny)
    tol_h = 10 * h * h * scale if tol_h is None else tol_h
    tol_e = 10 * h * h * scale if tol_e is None else tol_e
    tol_lin = 1e-6 * diameter if tol_lin is None else tol_lin

    c = float(np.mean(gn))
    max_lap = float(np.max(np.abs(lap)))
    eik_dev = float(np.max(np.abs(gn - c)))
    A = np.column_stack([X[valid], np.ones(int(valid.sum()))])
    coef, *_ = np.linalg.lstsq(A, f[valid], rcond=None)
    residual = float(np.max(np.abs(A @ coef - f[valid])))
    return LinearityVerdict(max_lap <= tol_h, eik_dev <= tol_e and c > 0, residual <= tol_lin,
                            coef, residual, c, max_lap, eik_dev,
                            {"tol_h": tol_h, "tol_e": tol_e, "tol_lin": tol_lin})


# ---------------------------------------------------------------------------
# minimal constant angle classification

HYPERPLANE = "Hyperplane"
CYLINDER_OVER_MINIMAL = "CylinderOverMinimal"
NOT_MINIMAL = "NotMinimal"
NOT_CONSTANT_ANGLE = "NotConstantAngle"
UNRESOLVED = "Unresolved"


@dataclass
class Classification:
    verdict: str
    max_mean_curvature: float
    theta_mean: float
    theta_spread: float
    slice_mean_curvature: float | None = None
    linearity: LinearityVerdict | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"verdict": self.verdict, "max_mean_curvature": self.max_mean_curvature,
               "theta_mean": self.theta_mean, "theta_spread": self.theta_spread,
               "slice_mean_curvature": self.slice_mean_curvature}
        if self.linearity is not None:
            out["linearity"] = self.linearity.to_dict()
        out.update(self.details)
        return out


def _height_grid(params, n=33):
    params = np.asarray(params, float)
    lo, hi = params.min(axis=0), params.max(axis=0)
    side = float(np.max(hi - lo)) or 1.0
    return Grid.box(lo, lo + side, n)


def classify_minimal_ca(surface, params, tol=1e-6, angle_tol=1e-8, height_grid=None) -> Classification:
    """Sort a hypersurface of Euclidean space into the minimal constant angle cases.

    Gates, in order: mean curvature (``NotMinimal``), angle constancy
    (``NotConstantAngle``), then ``theta = pi/2`` gives a cylinder whose
    slice curvature is checked, and otherwise the height function of a
    graph is tested for linearity (``Hyperplane``).

    Raises
    ------
    UnsupportedAmbientError
        If the warping function is not constant.
    """
    prof = surface.ambient.profile
    ts = prof.domain.sample(16)
    if prof.kind != "constant" and np.max(np.abs(prof.rho_prime(ts))) > 0:
        raise UnsupportedAmbientError("classification needs a Euclidean (constant profile) ambient")
    report = shape_report(surface, params)
    thetas = np.array([e.sample.theta for e in report.entries])
    Hmax = report.max_abs_mean_curvature
    spread = float(np.ptp(thetas))
    out = Classification(NOT_MINIMAL, Hmax, float(np.mean(thetas)), spread)
    if Hmax > tol:
        return out
    if spread > angle_tol:
        out.verdict = NOT_CONSTANT_ANGLE
        return out
    if abs(out.theta_mean - math.pi / 2) <= angle_tol:
        # with T = dt first in the frame, the rest of the matrix is the slice's shape operator
        slice_H = max(abs(float(np.trace(e.matrix[1:, 1:]))) for e in report.entries)
        out.slice_mean_curvature = slice_H
        out.verdict = CYLINDER_OVER_MINIMAL if slice_H <= tol else NOT_MINIMAL
        return out
    if not isinstance(surface, GraphSurface):
        out.verdict = UNRESOLVED
        out.details["reason"] = "height function unavailable for a non-graph surface"
        return out
    grid = height_grid or _height_grid(params)
    values = np.asarray(surface.f.value(grid.nodes()), float)
    lin = harmonic_eikonal_linearity(values, grid.h, origin=grid.origin)
    out.linearity = lin
    out.verdict = HYPERPLANE if lin.is_linear else UNRESOLVED
    return out


def helicoid_surface(pitch=1.0):
    """Helicoid ``(t, x, y) = (pitch v, u cos v, u sin v)`` in ``R x R^2``."""
    from .base_manifold import EuclideanFlat
    from .hypersurface import ParametrizedSurface
    from .warp import WarpedProduct, WarpingProfile

    amb = WarpedProduct(WarpingProfile.constant(1.0), EuclideanFlat(2))
    return ParametrizedSurface(
        lambda uv: np.array([pitch * uv[1], uv[0] * math.cos(uv[1]), uv[0] * math.sin(uv[1])]),
        amb, 2)
