"""Base manifolds, seed hypersurfaces and distance fields.

Points of the base are arrays in embedding coordinates: ``R^n`` for
:class:`EuclideanFlat` and ``R^3`` (with ``|p| = radius``) for
:class:`RoundSphere2`.  Every distance function here is *signed*, positive on
the side the seed's orientation points to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, OutOfRegionError, SingularPointError

EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# base manifolds

@dataclass(frozen=True)
class EuclideanFlat:
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")

    @property
    def embed_dim(self):
        return self.dimension

    def check_point(self, p):
        p = np.asarray(p, float)
        if p.shape[-1] != self.dimension:
            raise DomainError(f"expected points of dimension {self.dimension}")

    def tangent_basis(self, p):
        return np.eye(self.dimension)

    def project_tangent(self, p, v):
        return np.asarray(v, float)

    def exp(self, p, v):
        return np.asarray(p, float) + np.asarray(v, float)

    def inner(self, p, x, y):
        return float(np.dot(x, y))


@dataclass(frozen=True)
class RoundSphere2:
    """Round 2-sphere of the given radius, embedded in ``R^3`` at the origin."""

    radius: float = 1.0
    dimension: int = field(default=2, init=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    @property
    def embed_dim(self):
        return 3

    def check_point(self, p, tol=1e-9):
        p = np.asarray(p, float)
        if p.shape[-1] != 3:
            raise DomainError("sphere points live in R^3")
        if np.any(np.abs(np.linalg.norm(p, axis=-1) - self.radius) > tol * max(1.0, self.radius)):
            raise DomainError(f"point does not lie on the sphere of radius {self.radius}")

    def tangent_basis(self, p):
        n = np.asarray(p, float) / np.linalg.norm(p)
        a = np.eye(3)[np.argmin(np.abs(n))]
        e1 = a - np.dot(a, n) * n
        e1 /= np.linalg.norm(e1)
        return np.array([e1, np.cross(n, e1)])

    def project_tangent(self, p, v):
        n = np.asarray(p, float) / np.linalg.norm(p)
        v = np.asarray(v, float)
        return v - np.dot(v, n) * n

    def exp(self, p, v):
        p = np.asarray(p, float)
        v = self.project_tangent(p, v)
        speed = np.linalg.norm(v)
        if speed == 0:
            return p.copy()
        ang = speed / self.radius
        return math.cos(ang) * p + math.sin(ang) * self.radius * v / speed

    def inner(self, p, x, y):
        return float(np.dot(x, y))


BaseManifold = EuclideanFlat | RoundSphere2


def _angle(a, b):
    """Angle between vectors along the last axis, accurate near 0 and pi."""
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    return np.arctan2(cross, np.sum(a * b, axis=-1))


# ---------------------------------------------------------------------------
# seeds

@dataclass(frozen=True)
class Hyperplane:
    """``{p : <normal, p> = offset}``; positive side is where ``normal`` points."""

    normal: np.ndarray
    offset: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        nu = np.asarray(self.normal, float)
        object.__setattr__(self, "normal", nu)
        if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
            raise ValueError("hyperplane normal must be a unit vector")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def dimension(self):
        return self.normal.size


@dataclass(frozen=True)
class SphereShell:
    """Round sphere ``|p - center| = radius`` in flat space; positive outside."""

    center: np.ndarray
    radius: float
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, float))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def dimension(self):
        return self.center.size


class _SampledCurve:
    """Shared closest-point search for curves given by samples plus a callable."""

    closed: bool
    v: np.ndarray

    def _bracket(self, i):
        n = self.v.size
        if self.closed:
            step = self.v[1] - self.v[0]
            return self.v[i] - step, self.v[i] + step
        return self.v[max(i - 1, 0)], self.v[min(i + 1, n - 1)]

    def _sample_points(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class SphericalCurve(_SampledCurve):
    """Curve on ``S^2(radius)`` given by arc-uniform samples.

    ``alpha(v)`` and ``dalpha(v)`` describe the same curve on the *unit*
    sphere with unit speed; when omitted they are interpolated from the
    samples by a cubic spline.  The positive side is the one pointed to by
    ``alpha x alpha'``.
    """

    radius: float
    samples: np.ndarray
    v: np.ndarray
    alpha: Callable | None = None
    dalpha: Callable | None = None
    closed: bool = True
    orientation: int = 1

    def __post_init__(self):
        s = np.asarray(self.samples, float)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "v", np.asarray(self.v, float))
        if np.max(np.abs(np.linalg.norm(s, axis=1) - self.radius)) > 1e-12 * max(1.0, self.radius):
            raise ValueError("curve samples must lie on the sphere")
        u = s / self.radius
        steps = _angle(u[1:], u[:-1])
        if np.ptp(steps) > 1e-6:
            raise ValueError("curve samples must be uniform in arc length")
        if self.alpha is None:
            bc = "periodic" if self.closed else "not-a-knot"
            vv, uu = self.v, u
            if self.closed:
                vv = np.r_[vv, vv[-1] + (vv[1] - vv[0])]
                uu = np.vstack([u, u[:1]])
            spline = CubicSpline(vv, uu, bc_type=bc)
            dspline = spline.derivative()
            period = vv[-1] - vv[0]

            def alpha(v):
                if self.closed:
                    v = vv[0] + np.mod(np.asarray(v) - vv[0], period)
                a = spline(v)
                return a / np.linalg.norm(a, axis=-1, keepdims=True)

            def dalpha(v):
                if self.closed:
                    v = vv[0] + np.mod(np.asarray(v) - vv[0], period)
                return dspline(v)

            object.__setattr__(self, "alpha", alpha)
            object.__setattr__(self, "dalpha", dalpha)

    @classmethod
    def from_function(cls, alpha, dalpha, radius=1.0, v_range=(0.0, 2 * math.pi), n=720,
                      closed=True, orientation=1):
        if closed:
            v = np.linspace(v_range[0], v_range[1], n, endpoint=False)
        else:
            v = np.linspace(v_range[0], v_range[1], n)
        samples = radius * np.array([alpha(x) for x in v])
        samples *= radius / np.linalg.norm(samples, axis=1, keepdims=True)
        return cls(radius, samples, v, alpha, dalpha, closed, orientation)

    @classmethod
    def great_circle(cls, pole=(0.0, 0.0, 1.0), radius=1.0, n=720, orientation=1):
        """Great circle orthogonal to ``pole``; its positive side contains ``pole``."""
        nz = np.asarray(pole, float)
        nz = nz / np.linalg.norm(nz)
        e1 = RoundSphere2(1.0).tangent_basis(nz)[0]
        e2 = np.cross(nz, e1)
        return cls.from_function(lambda v: math.cos(v) * e1 + math.sin(v) * e2,
                                 lambda v: -math.sin(v) * e1 + math.cos(v) * e2,
                                 radius, n=n, orientation=orientation)

    def _sample_points(self):
        return self.samples / self.radius

    def normal(self, v):
        """Unit normal ``alpha x alpha'`` (unit-sphere coordinates)."""
        a = np.asarray(self.alpha(v), float)
        n = np.cross(a, np.asarray(self.dalpha(v), float))
        return n / np.linalg.norm(n)


@dataclass(frozen=True, eq=False)
class PlaneCurve(_SampledCurve):
    """Regular plane curve ``alpha(v)`` sampled on a parameter grid.

    The positive side is the one pointed to by ``alpha'`` rotated clockwise
    by a right angle.  ``alpha`` and ``dalpha`` must be callables.
    """

    alpha: Callable
    dalpha: Callable
    v: np.ndarray
    closed: bool = True
    orientation: int = 1
    samples: np.ndarray = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.v, float)
        object.__setattr__(self, "v", v)
        s = np.array([self.alpha(x) for x in v], float)
        object.__setattr__(self, "samples", s)
        speed = np.linalg.norm([self.dalpha(x) for x in v], axis=1)
        if np.min(speed) <= 1e-12:
            raise ValueError("plane curve must be regular")

    @classmethod
    def from_function(cls, alpha, dalpha, v_range=(0.0, 2 * math.pi), n=720, closed=True,
                      orientation=1):
        if closed:
            v = np.linspace(v_range[0], v_range[1], n, endpoint=False)
        else:
            v = np.linspace(v_range[0], v_range[1], n)
        return cls(alpha, dalpha, v, closed, orientation)

    def _sample_points(self):
        return self.samples

    def normal(self, v):
        t = np.asarray(self.dalpha(v), float)
        return np.array([t[1], -t[0]]) / np.linalg.norm(t)


# ---------------------------------------------------------------------------
# analytic distances

def _local_minima(curve, dists):
    if curve.closed:
        left, right = np.roll(dists, 1), np.roll(dists, -1)
    else:
        padded = np.r_[np.inf, dists, np.inf]
        left, right = padded[:-2], padded[2:]
    return np.flatnonzero((dists <= left) & (dists <= right))


def _refine(curve, x, metric, orth, i):
    a, b = curve._bracket(i)
    res = minimize_scalar(lambda v: float(metric(x, curve.alpha(v))),
                          bounds=(a, b), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, abs(b)), "maxiter": 500})
    v = float(res.x)
    if orth is not None:
        w = 1e-3 * (b - a)
        lo, hi = max(a, v - w), min(b, v + w)
        if orth(lo) * orth(hi) < 0:
            v = brentq(orth, lo, hi, xtol=1e-15, rtol=4 * EPS, maxiter=200)
    return v, float(metric(x, curve.alpha(v)))


def _curve_closest(curve, x, metric, orth=None, max_candidates=8):
    """Closest parameter on ``curve`` to one point.

    ``metric`` maps (point, array of curve points) to distances.  ``orth(v)``,
    when given, is the first-order optimality condition; its root is
    polished with Brent's method so the foot point is accurate to rounding
    (the bounded minimiser alone resolves it only to about sqrt(eps)).

    Every sampled local minimum that could be the global one is refined;
    the point is flagged ambiguous (cut locus) when two well separated
    refined minima tie.
    """
    pts = curve._sample_points()
    dists = metric(x, pts)
    spacing = float(np.max(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    tol = max(4 * spacing * spacing, 1e-12)
    cand = [i for i in _local_minima(curve, dists) if dists[i] <= dists.min() + tol]
    cand = sorted(cand, key=lambda i: dists[i])[:max_candidates]
    refined = [(*_refine(curve, x, metric, orth, i), i) for i in cand]
    v, d, ib = min(refined, key=lambda r: r[1])
    n = dists.size
    ambiguous = False
    for _, d2, i2 in refined:
        sep = abs(i2 - ib)
        if curve.closed:
            sep = min(sep, n - sep)
        if sep > 3 and abs(d2 - d) <= 1e-9 * max(1.0, d):
            ambiguous = True
    return v, d, ambiguous


def _spherical_curve_distance(seed: SphericalCurve, p, with_grad):
    r = seed.radius
    pu = np.asarray(p, float) / np.linalg.norm(p)
    v, ang, ambiguous = _curve_closest(
        seed, pu, lambda x, c: _angle(x, c),
        lambda v: float(np.dot(pu, np.asarray(seed.dalpha(v), float))))
    q = np.asarray(seed.alpha(v), float)
    q = q / np.linalg.norm(q)
    eta = seed.normal(v)
    sign = 1.0 if np.dot(pu, eta) >= 0 else -1.0
    sign *= seed.orientation
    d = sign * r * ang
    if not with_grad:
        return d, None
    if ambiguous:
        raise SingularPointError("point lies on the cut locus of the curve")
    if ang < 1e-8:
        grad = seed.orientation * eta
    else:
        w = (pu * math.cos(ang) - q) / math.sin(ang)
        grad = sign * w
    return d, grad


def _plane_curve_distance(seed: PlaneCurve, p, with_grad):
    p = np.asarray(p, float)
    v, dist, ambiguous = _curve_closest(
        seed, p, lambda x, c: np.linalg.norm(np.asarray(c) - x, axis=-1),
        lambda v: float(np.dot(p - np.asarray(seed.alpha(v), float),
                               np.asarray(seed.dalpha(v), float))))
    q = np.asarray(seed.alpha(v), float)
    n = seed.normal(v)
    sign = (1.0 if np.dot(p - q, n) >= 0 else -1.0) * seed.orientation
    d = sign * dist
    if not with_grad:
        return d, None
    if ambiguous:
        raise SingularPointError("point lies on the cut locus of the curve")
    grad = seed.orientation * n if dist < 1e-10 else sign * (p - q) / dist
    return d, grad


def _distance(seed, p, with_grad):
    p = np.asarray(p, float)
    if isinstance(seed, Hyperplane):
        d = seed.orientation * (p @ seed.normal - seed.offset)
        g = np.broadcast_to(seed.orientation * seed.normal, p.shape).copy()
        return d, g
    if isinstance(seed, SphereShell):
        diff = p - seed.center
        r = np.linalg.norm(diff, axis=-1)
        if np.any(r < 1e-14 * max(1.0, seed.radius)):
            if with_grad:
                raise SingularPointError("distance to a sphere is singular at its center")
        d = seed.orientation * (r - seed.radius)
        if not with_grad:
            return d, None
        return d, seed.orientation * diff / np.expand_dims(r, -1)
    if isinstance(seed, (SphericalCurve, PlaneCurve)):
        fn = _spherical_curve_distance if isinstance(seed, SphericalCurve) else _plane_curve_distance
        if p.ndim == 1:
            return fn(seed, p, with_grad)
        out = [fn(seed, q, with_grad) for q in p.reshape(-1, p.shape[-1])]
        d = np.array([o[0] for o in out]).reshape(p.shape[:-1])
        if not with_grad:
            return d, None
        return d, np.array([o[1] for o in out]).reshape(p.shape)
    raise TypeError(f"no analytic distance for seed of type {type(seed).__name__}")


def distance_analytic(seed, p):
    """Signed distance to ``seed`` and its unit gradient at ``p``.

    Raises
    ------
    SingularPointError
        At a sphere center or on the cut locus of a curve.
    """
    return _distance(seed, p, True)


def distance_value(seed, p):
    """Signed distance only; defined even where the gradient is not."""
    return _distance(seed, p, False)[0]


# ---------------------------------------------------------------------------
# distance fields

@dataclass(frozen=True)
class Grid:
    """Regular grid with uniform spacing ``h``; nodes ``origin + index * h``."""

    shape: tuple
    h: float
    origin: tuple

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if len(self.shape) != len(self.origin):
            raise ValueError("shape and origin dimensions differ")

    @classmethod
    def box(cls, lo, hi, n):
        """``n`` nodes per axis spanning the cube ``[lo, hi]^dim`` (lo, hi sequences)."""
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        steps = (hi - lo) / (n - 1)
        if not np.allclose(steps, steps[0], rtol=1e-12):
            raise ValueError("non-uniform grids are not supported")
        return cls(tuple([n] * lo.size), float(steps[0]), tuple(lo))

    @property
    def ndim(self):
        return len(self.shape)

    def axes(self):
        return [o + self.h * np.arange(n) for o, n in zip(self.origin, self.shape)]

    def nodes(self):
        """Node coordinates, shape ``shape + (ndim,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)


class DistanceField:
    """Common interface: ``value``, ``gradient``, ``is_valid`` and ``tau``."""

    seed: object
    tau: float

    def value(self, p):
        raise NotImplementedError

    def gradient(self, p):
        raise NotImplementedError

    def is_valid(self, p):
        raise NotImplementedError


class AnalyticDistance(DistanceField):
    """Exact signed distance to an analytic seed.

    ``tube_radius`` bounds ``|d|`` (the tubular neighbourhood); points off
    it, on the cut locus, or where a finite-difference gradient norm deviates
    from 1 by more than ``tau`` are outside the validity region.
    """

    kind = "analytic"

    def __init__(self, seed, base, tube_radius=math.inf, tau=1e-9):
        self.seed = seed
        self.base = base
        self.tube_radius = tube_radius
        self.tau = tau

    def value(self, p):
        return distance_value(self.seed, p)

    def gradient(self, p):
        return distance_analytic(self.seed, p)[1]

    def value_and_gradient(self, p):
        return distance_analytic(self.seed, p)

    def fd_gradient_norm(self, p, step=1e-3):
        """Fourth-order finite-difference norm of the gradient at one point."""
        p = np.asarray(p, float)
        basis = self.base.tangent_basis(p)
        scale = step * max(1.0, float(np.linalg.norm(p)))
        g = []
        for e in basis:
            vals = [float(distance_value(self.seed, self.base.exp(p, k * scale * e)))
                    for k in (-2, -1, 1, 2)]
            g.append((vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * scale))
        return float(np.linalg.norm(g))

    def is_valid(self, p):
        p = np.asarray(p, float)
        if p.ndim > 1:
            return np.array([self.is_valid(q) for q in p.reshape(-1, p.shape[-1])]).reshape(p.shape[:-1])
        try:
            d, _ = distance_analytic(self.seed, p)
        except SingularPointError:
            return False
        if abs(d) >= self.tube_radius:
            return False
        return abs(self.fd_gradient_norm(p) - 1.0) <= max(self.tau, 1e-9)


class GridDistance(DistanceField):
    """Distance values on a regular grid (e.g. from fast marching)."""

    kind = "grid"

    def __init__(self, seed, grid: Grid, values, tau=None):
        self.seed = seed
        self.grid = grid
        self.values = np.asarray(values, float)
        self.tau = 4 * grid.h if tau is None else tau
        axes = grid.axes()
        self.grad_values = np.stack(np.gradient(self.values, grid.h), axis=-1) \
            if grid.ndim > 1 else np.gradient(self.values, grid.h)[..., None]
        norm = np.linalg.norm(self.grad_values, axis=-1)
        self.valid = np.abs(norm - 1.0) <= self.tau
        self._d = RegularGridInterpolator(axes, self.values, bounds_error=False, fill_value=np.nan)
        self._g = RegularGridInterpolator(axes, self.grad_values, bounds_error=False,
                                          fill_value=np.nan)

    def value(self, p):
        p = np.asarray(p, float)
        out = self._d(p.reshape(-1, self.grid.ndim)).reshape(p.shape[:-1])
        return float(out) if out.ndim == 0 else out

    def gradient(self, p):
        p = np.asarray(p, float)
        return self._g(p.reshape(-1, self.grid.ndim)).reshape(p.shape)

    def is_valid(self, p):
        """True where every grid node of the enclosing cell is valid."""
        p = np.atleast_2d(np.asarray(p, float))
        rel = (p - np.asarray(self.grid.origin)) / self.grid.h
        lo = np.floor(rel).astype(int)
        shape = np.asarray(self.grid.shape)
        ok = np.all((lo >= 0) & (lo + 1 < shape), axis=1)
        for corner in np.ndindex(*([2] * self.grid.ndim)):
            idx = np.clip(lo + np.asarray(corner), 0, shape - 1)
            ok &= self.valid[tuple(idx.T)]
        return ok if ok.size > 1 else bool(ok[0])


def grad_field(field: DistanceField, p):
    """Gradient of a distance field at ``p``; raises outside the validity region."""
    if not np.all(field.is_valid(p)):
        raise OutOfRegionError("point outside the distance field's validity region")
    return field.gradient(p)
