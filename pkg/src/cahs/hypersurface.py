"""Constant angle hypersurfaces and their numerically measured extrinsic geometry.

A surface maps parameters to ambient coordinate arrays ``x = (t, p...)``.
Normals and tangent vectors are coordinate arrays ``(dt, base...)`` in the
same layout; inner products always use the warped metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .base_manifold import (EuclideanFlat, Hyperplane, PlaneCurve, RoundSphere2, SphereShell,
                            SphericalCurve, distance_analytic, distance_value)
from .errors import DomainError, OutOfRegionError, SingularPointError, StepError
from .warp import (QUAD_EPSABS, QUAD_EPSREL, AmbientVector, Interval, WarpedProduct, WarpingProfile,
                   reciprocal_rho_integral)

EPS = np.finfo(float).eps
FD_SCALE = EPS ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# samples

@dataclass
class SurfaceSample:
    """Pointwise extrinsic data: unit normal, angle, ``T`` and an orthonormal frame.

    ``T`` is ``None`` when ``theta == 0`` (the normal is ``d/dt``).  When it
    exists it is the first frame vector.
    """

    t: float
    p: np.ndarray
    xi: AmbientVector
    theta: float
    T: AmbientVector | None
    frame: list = field(default_factory=list)

    @property
    def point(self):
        return (self.t, self.p)

    def residuals(self, ambient: WarpedProduct):
        """``|xi| - 1``, worst ``<xi, e_i>`` and the error of ``dt = sin T + cos xi``."""
        xi = self.xi.as_array()
        norm_err = abs(ambient.norm(self.t, xi) - 1.0)
        orth = max((abs(ambient.inner(self.t, xi, e.as_array())) for e in self.frame), default=0.0)
        dt = np.zeros_like(xi)
        dt[0] = 1.0
        recon = math.cos(self.theta) * xi
        if self.T is not None:
            recon = recon + math.sin(self.theta) * self.T.as_array()
        decomp = math.sqrt(ambient.inner(self.t, recon - dt, recon - dt))
        return {"xi_norm": norm_err, "orthogonality": orth, "decomposition": decomp}


def measured_angle(ambient: WarpedProduct, x, xi):
    """Angle between ``xi`` and ``d/dt`` from the components, stable near 0 and pi/2."""
    r = float(ambient.profile(x[0]))
    return math.atan2(r * float(np.linalg.norm(xi[1:])), float(xi[0]))


def _gram_schmidt(ambient, t, vectors, tol=1e-10):
    out = []
    for v in vectors:
        w = np.array(v, float)
        for e in out:
            w = w - ambient.inner(t, w, e) * e
        n = ambient.norm(t, w)
        if n > tol * max(1.0, ambient.norm(t, v)):
            out.append(w / n)
    return out


def _make_sample(ambient, x, xi, tangents):
    t, p = float(x[0]), np.asarray(x[1:], float)
    theta = measured_angle(ambient, x, xi)
    at = (t, p)
    T = None
    vecs = list(tangents)
    if math.sin(theta) > 1e-12:
        dt = np.zeros_like(xi)
        dt[0] = 1.0
        Tarr = (dt - math.cos(theta) * xi) / math.sin(theta)
        T = AmbientVector.from_array(Tarr, at)
        vecs = [Tarr] + vecs
    frame = _gram_schmidt(ambient, t, vecs)[: len(tangents)]
    return SurfaceSample(t, p, AmbientVector.from_array(xi, at), theta, T,
                         [AmbientVector.from_array(e, at) for e in frame])


def _fd_step(u):
    return FD_SCALE * (1.0 + np.abs(np.asarray(u, float)))


# ---------------------------------------------------------------------------
# surfaces

class Surface:
    """Base class.  Subclasses provide ``position`` and usually ``normal``."""

    ambient: WarpedProduct
    dim: int

    def position(self, param) -> np.ndarray:
        raise NotImplementedError

    def local_chart(self, param) -> Callable:
        """Map local coordinates ``w`` (``w = 0`` at ``param``) to parameters."""
        param = np.asarray(param, float)
        return lambda w: param + np.asarray(w, float)

    def tangents(self, param):
        # fourth-order stencil: its rounding noise stays small when the
        # resulting normal is differentiated again by the shape operator
        chart = self.local_chart(param)
        step = EPS ** 0.2 * max(1.0, float(np.max(np.abs(param))))
        out = []
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = step
            pos = [self.position(chart(c * e)) for c in (-2, -1, 1, 2)]
            out.append((pos[0] - 8 * pos[1] + 8 * pos[2] - pos[3]) / (12 * step))
        return np.array(out)

    def orientation_hint(self, x):
        """Used only when the normal has no ``d/dt`` component."""
        return None

    def normal(self, param):
        """Unit normal orthogonal to the finite-difference tangents (warped metric),
        oriented so that ``<xi, d/dt> >= 0``."""
        x = self.position(param)
        Y = self.tangents(param)
        G = self.ambient.metric_weights(x[0])
        rows = [G * y for y in Y]
        if isinstance(self.ambient.base, RoundSphere2):
            rows.append(np.r_[0.0, x[1:]])
        _, _, vt = np.linalg.svd(np.array(rows))
        xi = vt[-1]
        return self._orient(x, xi / self.ambient.norm(x[0], xi))

    def _orient(self, x, xi):
        if xi[0] < 0 or (xi[0] == 0 and self._flip_for_hint(x, xi)):
            xi = -xi
        return xi

    def _flip_for_hint(self, x, xi):
        hint = self.orientation_hint(x)
        return hint is not None and float(np.dot(hint, xi[1:])) < 0

    def sample(self, param) -> SurfaceSample:
        return _make_sample(self.ambient, self.position(param), self.normal(param),
                            self.tangents(param))

    # only surfaces that can locate themselves support curve integration
    def project(self, x):
        raise NotImplementedError(f"{type(self).__name__} cannot project ambient points")

    def param_of(self, x):
        raise NotImplementedError(f"{type(self).__name__} cannot invert its parametrization")

    def uv_param(self, u, v):
        return np.array([u, v], float)

    def display_point(self, x):
        """Point of ``R^3`` used for mesh export (2-dimensional surfaces only)."""
        if isinstance(self.ambient.base, RoundSphere2):
            return x[0] * x[1:]
        if self.ambient.base.dimension != 2:
            raise ValueError("mesh export needs a 3-dimensional ambient")
        return np.array([x[1], x[2], x[0]])


class GraphSurface(Surface):
    """``{(f(p), p)}`` for a scalar field with ``value`` and ``gradient``."""

    def __init__(self, f, ambient: WarpedProduct):
        self.f = f
        self.ambient = ambient
        self.dim = ambient.base.dimension

    def position(self, p):
        p = np.asarray(p, float)
        return np.r_[float(self.f.value(p)), p]

    def normal(self, p):
        xi, _ = graph_normal_and_angle(self.f, self.ambient.profile, p)
        return xi

    def local_chart(self, p):
        p = np.asarray(p, float)
        basis = self.ambient.base.tangent_basis(p)
        return lambda w: self.ambient.base.exp(p, np.asarray(w, float) @ basis)

    def tangents(self, p):
        p = np.asarray(p, float)
        g = np.asarray(self.f.gradient(p), float)
        return np.array([np.r_[np.dot(g, e), e] for e in self.ambient.base.tangent_basis(p)])

    def project(self, x):
        p = np.asarray(x[1:], float)
        if isinstance(self.ambient.base, RoundSphere2):
            p = p * self.ambient.base.radius / np.linalg.norm(p)
        return self.position(p)

    def param_of(self, x):
        return np.asarray(x[1:], float)

    def uv_param(self, u, v):
        """Plane coordinates, or polar/azimuthal angles on a sphere base."""
        base = self.ambient.base
        if isinstance(base, RoundSphere2):
            return base.radius * np.array([math.sin(u) * math.cos(v),
                                           math.sin(u) * math.sin(v), math.cos(u)])
        return np.array([u, v], float)


class SliceSurface(Surface):
    """``{t0} x P`` (the theta = 0 case) over a flat base."""

    def __init__(self, t0, ambient: WarpedProduct):
        ambient.profile.domain.check(t0, "t0")
        self.t0 = float(t0)
        self.ambient = ambient
        self.dim = ambient.base.dimension

    def position(self, p):
        return np.r_[self.t0, np.asarray(p, float)]

    def normal(self, p):
        xi = np.zeros(1 + self.ambient.base.embed_dim)
        xi[0] = 1.0
        return xi

    def tangents(self, p):
        return np.array([np.r_[0.0, e] for e in self.ambient.base.tangent_basis(p)])

    def project(self, x):
        return np.r_[self.t0, np.asarray(x[1:], float)]

    def param_of(self, x):
        return np.asarray(x[1:], float)


class CylinderSurface(Surface):
    """``I x L`` for an analytic seed ``L`` of the base (theta = pi/2).

    Parameters are ``(t, q...)`` with ``q`` a point of ``L``.
    """

    def __init__(self, seed, ambient: WarpedProduct, interval: Interval | None = None):
        self.seed = seed
        self.ambient = ambient
        self.interval = interval or ambient.profile.domain
        self.dim = ambient.base.dimension

    def _project_base(self, p):
        d, g = distance_analytic(self.seed, p)
        return self.ambient.base.exp(p, -d * np.asarray(g, float))

    def _seed_normal(self, q):
        return np.asarray(distance_analytic(self.seed, q)[1], float)

    def _seed_tangent_basis(self, q):
        eta = self._seed_normal(q)
        basis = []
        for e in self.ambient.base.tangent_basis(q):
            w = e - np.dot(e, eta) * eta
            for b in basis:
                w = w - np.dot(w, b) * b
            if np.linalg.norm(w) > 1e-8:
                basis.append(w / np.linalg.norm(w))
        return np.array(basis[: self.dim - 1])

    def position(self, param):
        param = np.asarray(param, float)
        self.interval.check(param[0])
        return param.copy()

    def normal(self, param):
        param = np.asarray(param, float)
        t, q = param[0], param[1:]
        eta = self._seed_normal(q)
        return np.r_[0.0, eta / float(self.ambient.profile(t))]

    def local_chart(self, param):
        param = np.asarray(param, float)
        t, q = param[0], param[1:]
        basis = self._seed_tangent_basis(q)

        def chart(w):
            w = np.asarray(w, float)
            moved = self.ambient.base.exp(q, w[1:] @ basis) if basis.size else q
            return np.r_[t + w[0], self._project_base(moved)]

        return chart

    def tangents(self, param):
        param = np.asarray(param, float)
        dt = np.zeros(param.size)
        dt[0] = 1.0
        return np.array([dt] + [np.r_[0.0, e] for e in self._seed_tangent_basis(param[1:])])

    def project(self, x):
        x = np.asarray(x, float)
        return np.r_[x[0], self._project_base(x[1:])]

    def param_of(self, x):
        return np.asarray(x, float)

    def uv_param(self, u, v):
        """``u`` is the height ``t``, ``v`` runs along ``L`` (curves in the plane)."""
        return np.r_[u, self._curve_point(v)]

    def _curve_point(self, v):
        s = self.seed
        if isinstance(s, Hyperplane) and s.dimension == 2:
            return s.offset * s.normal + v * np.array([-s.normal[1], s.normal[0]])
        if isinstance(s, SphereShell) and s.dimension == 2:
            return s.center + s.radius * np.array([math.cos(v), math.sin(v)])
        if isinstance(s, (SphericalCurve,)):
            a = np.asarray(s.alpha(v), float)
            return s.radius * a / np.linalg.norm(a)
        if isinstance(s, PlaneCurve):
            return np.asarray(s.alpha(v), float)
        raise ValueError("mesh parameters need a curve seed in a 2-dimensional base")


class ParametrizedSurface(Surface):
    """Surface given by an arbitrary map ``fn(u) -> (t, p...)``; normals by finite differences."""

    def __init__(self, fn, ambient: WarpedProduct, dim=None, hint=None):
        self.fn = fn
        self.ambient = ambient
        self.dim = dim or ambient.base.dimension
        self._hint = hint

    def position(self, u):
        return np.asarray(self.fn(np.asarray(u, float)), float)

    def orientation_hint(self, x):
        return None if self._hint is None else self._hint(x)


# ---------------------------------------------------------------------------
# graph normal

def graph_normal_and_angle(f, profile: WarpingProfile, p):
    """Unit normal ``(rho(f)^2 dt - grad f) / |.|`` of the graph of ``f`` and its angle with ``dt``.

    Vectorised over leading axes of ``p``.  Returns ``(xi, theta)`` with
    ``theta = arctan(|grad f| / rho(f))`` in ``[0, pi/2)``.
    """
    p = np.asarray(p, float)
    fv = np.asarray(f.value(p), float)
    g = np.asarray(f.gradient(p), float)
    r = np.asarray(profile(fv), float)
    gn = np.linalg.norm(g, axis=-1)
    denom = np.sqrt(r * r + gn * gn)
    xi = np.concatenate([np.expand_dims(r / denom, -1),
                         -g / np.expand_dims(r * denom, -1)], axis=-1)
    theta = np.arctan2(gn, r)
    return xi, (float(theta) if theta.ndim == 0 else theta)


def graph_angle(f, profile, p):
    return graph_normal_and_angle(f, profile, p)[1]


def cylinder_sample(L, ambient: WarpedProduct, t, q) -> SurfaceSample:
    """Sample of the cylinder ``I x L`` at ``(t, q)``; theta = pi/2 and ``T = dt``."""
    ambient.profile.domain.check(t)
    return CylinderSurface(L, ambient).sample(np.r_[t, np.asarray(q, float)])


# ---------------------------------------------------------------------------
# published parametrizations

def _unit(v):
    return v / np.linalg.norm(v)


def munteanu_phi(theta, alpha, dalpha, u, v):
    """Brace point of the constant slope parametrization, on ``S^2(sin theta)``."""
    if u <= 0:
        raise DomainError("u must be positive")
    a = np.asarray(alpha(v), float)
    da = np.asarray(dalpha(v), float)
    ang = math.log(u) / math.tan(theta)
    return math.sin(theta) * (math.cos(ang) * a + math.sin(ang) * np.cross(a, da))


def munteanu_parametrize(theta, alpha, dalpha, u, v):
    """``r(u, v) = u sin(theta) [cos(cot(theta) ln u) alpha + sin(cot(theta) ln u) alpha x alpha']``.

    ``alpha`` is a unit-speed curve on the unit sphere.  ``|r| = u sin(theta)``;
    ``(t, p) -> t p`` maps the warped-model point ``(u, phi(u, v))`` to ``r``.
    """
    if not 0 < theta < math.pi / 2:
        raise DomainError("theta must lie in (0, pi/2)")
    return u * munteanu_phi(theta, alpha, dalpha, u, v)


class MunteanuSurface(Surface):
    """Constant slope surface in ``(0, inf) x_rho S^2(sin theta)``, ``rho(t) = t / sin(theta)``.

    Parameters ``(u, v)``; ``position`` gives the warped-model point
    ``(u, phi(u, v))`` and :meth:`r` the point of ``R^3``.
    """

    def __init__(self, theta, alpha, dalpha):
        self.theta = float(theta)
        self.alpha = alpha
        self.dalpha = dalpha
        self.ambient = WarpedProduct(WarpingProfile.linear_over_sin(theta),
                                     RoundSphere2(math.sin(theta)))
        self.dim = 2

    def position(self, uv):
        u, v = uv
        return np.r_[u, munteanu_phi(self.theta, self.alpha, self.dalpha, u, v)]

    def r(self, u, v):
        return munteanu_parametrize(self.theta, self.alpha, self.dalpha, u, v)

    def seed(self, n=720):
        return SphericalCurve.from_function(self.alpha, self.dalpha, math.sin(self.theta), n=n)

    def radial_angle(self, u, v, step=None):
        """Euclidean angle in ``R^3`` between the finite-difference normal of ``r`` and ``r``.

        The map to ``R^3`` is a homothety of the warped model, so this is
        the warped angle theta.
        """
        hu, hv = step or _fd_step([u, v])
        ru = (self.r(u + hu, v) - self.r(u - hu, v)) / (2 * hu)
        rv = (self.r(u, v + hv) - self.r(u, v - hv)) / (2 * hv)
        n = np.cross(ru, rv)
        x = self.r(u, v)
        return math.atan2(np.linalg.norm(np.cross(n, x)), abs(np.dot(n, x)))


class TrigPolynomial:
    """``g(s) = a0 + sum_k (a_k cos ks + b_k sin ks)``.

    Provides the exact primitive of ``g(s) (-sin s, cos s)``, which lets the
    Dillen base curve be evaluated in closed form.
    """

    def __init__(self, a, b=()):
        a = list(map(float, a))
        b = list(map(float, b))
        n = max(len(a), len(b) + 1)
        self.a = np.r_[a, np.zeros(n - len(a))]
        self.b = np.r_[0.0, b, np.zeros(n - 1 - len(b))]
        # complex coefficients c_k of e^{iks}, k = -(n-1)..(n-1)
        self._c = {0: complex(self.a[0])}
        for k in range(1, n):
            self._c[k] = complex(self.a[k], -self.b[k]) / 2
            self._c[-k] = complex(self.a[k], self.b[k]) / 2

    def __call__(self, s):
        s = np.asarray(s, float)
        k = np.arange(self.a.size)
        out = np.cos(np.multiply.outer(s, k)) @ self.a + np.sin(np.multiply.outer(s, k)) @ self.b
        return float(out) if out.ndim == 0 else out

    def _primitive(self, s):
        # int g(s) i e^{is} ds
        z = 0j
        for k, c in self._c.items():
            if k == -1:
                z += 1j * c * s
            else:
                z += c * np.exp(1j * (k + 1) * s) / (k + 1)
        return z

    def curve(self, v, v0=0.0):
        """``(-int_{v0}^{v} g sin, int_{v0}^{v} g cos)``."""
        z = self._primitive(v) - self._primitive(v0)
        return np.array([z.real, z.imag])

    def closes(self):
        return abs(self._c.get(-1, 0)) < 1e-15 and abs(self._c.get(1, 0)) < 1e-15


def _quad(fn, a, b):
    val, _ = integrate.quad(fn, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    return val


def dillen_parametrize(theta, profile: WarpingProfile, g, u, v, s_lower=1.0, v_lower=0.0):
    """Point ``(u sin theta, x, y)`` of the constant angle surface in ``I x_rho R^2``.

    Both inner integrals are computed by quadrature from the fixed lower
    limits ``s_lower`` and ``v_lower``; other choices only translate the surface.
    """
    if not 0 < theta <= math.pi / 2:
        raise DomainError("theta must lie in (0, pi/2]")
    t = u * math.sin(theta)
    profile.domain.check(t, "u sin(theta)")
    F = reciprocal_rho_integral(profile, 1.0, s_lower, t, method="quad") if t != s_lower else 0.0
    radial = F / math.tan(theta)
    gs = _quad(lambda s: g(s) * math.sin(s), v_lower, v)
    gc = _quad(lambda s: g(s) * math.cos(s), v_lower, v)
    return np.array([t, radial * math.cos(v) - gs, radial * math.sin(v) + gc])


class DillenSurface(Surface):
    """Surface of item (1) of the Dillen-Munteanu-Van der Veken-Vrancken classification."""

    def __init__(self, theta, profile: WarpingProfile, g, s_lower=1.0, v_lower=0.0,
                 g_floor=1e-6, v_range=(0.0, 2 * math.pi)):
        samples = np.abs(np.asarray([g(s) for s in np.linspace(*v_range, 257)]))
        if samples.min() < g_floor:
            raise ValueError("g must stay away from zero for the base curve to be regular")
        self.theta = float(theta)
        self.profile = profile
        self.g = g
        self.s_lower = float(s_lower)
        self.v_lower = float(v_lower)
        self.ambient = WarpedProduct(profile, EuclideanFlat(2))
        self.dim = 2

    def position(self, uv):
        return dillen_parametrize(self.theta, self.profile, self.g, uv[0], uv[1],
                                  self.s_lower, self.v_lower)

    def base_point(self, u, v):
        return self.position((u, v))[1:]

    def seed(self, n=720):
        """The base curve ``alpha`` as a plane-curve seed (needs a :class:`TrigPolynomial` g)."""
        if not isinstance(self.g, TrigPolynomial):
            raise TypeError("closed-form base curve needs a TrigPolynomial g")
        g, v0 = self.g, self.v_lower
        return PlaneCurve.from_function(
            lambda v: g.curve(v, v0), lambda v: g(v) * np.array([-math.sin(v), math.cos(v)]),
            n=n, closed=g.closes())


def dillen_cylinder_G(theta, profile: WarpingProfile, t, s_lower=1.0):
    """``G(t) = cot(theta) int_{s_lower}^{t} dsigma / rho(sigma)`` by quadrature."""
    profile.domain.check(t)
    if t == s_lower:
        return 0.0
    return reciprocal_rho_integral(profile, 1.0, s_lower, t, method="quad") / math.tan(theta)


def dillen_cylinder_surface(theta, profile: WarpingProfile, s_lower=1.0):
    """The cylinder ``x = G(t)`` in ``I x_rho R^2``, parameters ``(t, y)``."""
    ambient = WarpedProduct(profile, EuclideanFlat(2))
    return ParametrizedSurface(
        lambda ty: np.array([ty[0], dillen_cylinder_G(theta, profile, ty[0], s_lower), ty[1]]),
        ambient, 2)


# ---------------------------------------------------------------------------
# shape operator

@dataclass
class ShapeEntry:
    """Shape operator at one sample, in the sample's orthonormal frame."""

    sample: SurfaceSample
    matrix: np.ndarray
    principal_curvatures: np.ndarray
    asymmetry: float
    richardson_gap: float
    mean_curvature: float
    lambda_T: float | None = None
    T_angle: float | None = None
    expected_lambda_T: float | None = None

    @property
    def lambda_T_error(self):
        if self.lambda_T is None:
            return None
        return abs(self.lambda_T - self.expected_lambda_T)


def _shape_matrix(surface, param, sample, step):
    amb = surface.ambient
    chart = surface.local_chart(param)
    x0 = np.r_[sample.t, sample.p]
    xi0 = sample.xi.as_array()
    frame = np.array([e.as_array() for e in sample.frame])
    n = surface.dim
    B = np.empty((n, n))
    M = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step[k]
        try:
            pp, pm = chart(e), chart(-e)
            xp, xm = surface.position(pp), surface.position(pm)
            np_, nm = surface.normal(pp), surface.normal(pm)
        except (DomainError, OutOfRegionError, SingularPointError) as exc:
            raise StepError(f"finite-difference step leaves the domain: {exc}") from exc
        Y = (xp - xm) / (2 * step[k])
        dxi = (np_ - nm) / (2 * step[k])
        AY = -amb.connection(x0[0], x0[1:], Y, xi0, dxi)
        for i in range(n):
            B[i, k] = amb.inner(x0[0], Y, frame[i])
            M[i, k] = amb.inner(x0[0], AY, frame[i])
    return M @ np.linalg.inv(B)


def shape_operator_fd(surface: Surface, param, step=None) -> ShapeEntry:
    """Shape operator ``A Y = -nabla_Y xi`` from central differences of the normal.

    Coordinate derivatives of ``xi`` along the tangent directions are
    corrected by the warped-product connection terms; the matrix is
    expressed in the sample's orthonormal frame, symmetrised, and
    diagonalised.  A second evaluation at twice the step gives a
    Richardson-style consistency gap.
    """
    param = np.asarray(param, float)
    sample = surface.sample(param)
    if step is None:
        step = _fd_step(np.zeros(surface.dim)) * max(1.0, float(np.max(np.abs(param))))
    step = np.broadcast_to(np.asarray(step, float), (surface.dim,)).copy()
    if np.any(step <= 10 * EPS):
        raise StepError("finite-difference step underflows")
    A = _shape_matrix(surface, param, sample, step)
    A2 = _shape_matrix(surface, param, sample, 2 * step)
    asym = float(np.max(np.abs(A - A.T)))
    S = 0.5 * (A + A.T)
    lam = np.linalg.eigvalsh(S)
    entry = ShapeEntry(sample, S, lam, asym, float(np.max(np.abs(A - A2))), float(np.trace(S)))
    if sample.T is not None:
        tau = np.zeros(surface.dim)
        tau[0] = 1.0
        At = A @ tau
        entry.lambda_T = float(At[0])
        entry.T_angle = float(math.atan2(np.linalg.norm(At[1:]), abs(At[0]))) \
            if np.linalg.norm(At) > 1e-6 else 0.0
        k = float(surface.ambient.profile.log_derivative(sample.t))
        entry.expected_lambda_T = -math.cos(sample.theta) * k
    return entry


@dataclass
class ShapeReport:
    entries: list

    @property
    def max_asymmetry(self):
        return max(e.asymmetry for e in self.entries)

    @property
    def max_T_angle(self):
        return max((e.T_angle for e in self.entries if e.T_angle is not None), default=0.0)

    @property
    def max_lambda_T_relative_error(self):
        errs = [e.lambda_T_error / max(abs(e.expected_lambda_T), 1e-300)
                for e in self.entries if e.lambda_T is not None and e.expected_lambda_T != 0]
        return max(errs, default=0.0)

    @property
    def max_abs_mean_curvature(self):
        return max(abs(e.mean_curvature) for e in self.entries)


def shape_report(surface, params, step=None) -> ShapeReport:
    return ShapeReport([shape_operator_fd(surface, p, step) for p in params])


# ---------------------------------------------------------------------------
# integral curves of T

@dataclass
class CurveResult:
    s: np.ndarray
    points: np.ndarray
    tangential_residual: np.ndarray
    normal_component: np.ndarray
    expected_normal: np.ndarray
    ambient_residual: np.ndarray
    truncated: bool = False

    @property
    def max_tangential(self):
        return float(np.max(self.tangential_residual)) if self.tangential_residual.size else 0.0

    @property
    def max_normal_error(self):
        if not self.normal_component.size:
            return 0.0
        return float(np.max(np.abs(self.normal_component - self.expected_normal)))

    @property
    def max_ambient(self):
        return float(np.max(self.ambient_residual)) if self.ambient_residual.size else 0.0


def _T_field(surface, x):
    param = surface.param_of(x)
    xi = surface.normal(param)
    theta = measured_angle(surface.ambient, x, xi)
    if math.sin(theta) < 1e-12:
        raise SingularPointError("T is undefined where the normal is d/dt")
    dt = np.zeros_like(xi)
    dt[0] = 1.0
    return (dt - math.cos(theta) * xi) / math.sin(theta), xi, theta


def integral_curve_T(surface: Surface, start, length=1.0, step=1e-3) -> CurveResult:
    """Integrate ``x' = T(x)`` with classical RK4, projecting onto the surface each step.

    The covariant acceleration along the curve is measured from central
    differences of the velocity; its tangential part should vanish and its
    normal part should equal ``-cos(theta) rho'/rho``.
    """
    amb = surface.ambient
    x = surface.project(surface.position(start))
    n = int(round(length / step))
    xs, Ts, xis, thetas = [], [], [], []
    truncated = False
    try:
        for i in range(n + 1):
            T, xi, th = _T_field(surface, x)
            xs.append(x)
            Ts.append(T)
            xis.append(xi)
            thetas.append(th)
            if i == n:
                break
            k1 = T
            k2 = _T_field(surface, x + 0.5 * step * k1)[0]
            k3 = _T_field(surface, x + 0.5 * step * k2)[0]
            k4 = _T_field(surface, x + step * k3)[0]
            x = surface.project(x + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
    except (DomainError, OutOfRegionError, SingularPointError, ValueError):
        truncated = True
    xs, Ts = np.array(xs), np.array(Ts)
    tang, normal, expected, full = [], [], [], []
    for i in range(1, len(xs) - 1):
        acc = (Ts[i + 1] - Ts[i - 1]) / (2 * step)
        t = xs[i][0]
        cov = amb.connection(t, xs[i][1:], Ts[i], Ts[i], acc)
        nc = amb.inner(t, cov, xis[i])
        tv = cov - nc * xis[i]
        tang.append(amb.norm(t, tv))
        normal.append(nc)
        expected.append(-math.cos(thetas[i]) * float(amb.profile.log_derivative(t)))
        full.append(amb.norm(t, cov))
    return CurveResult(step * np.arange(len(xs)), xs, np.array(tang), np.array(normal),
                       np.array(expected), np.array(full), truncated)


# ---------------------------------------------------------------------------
# mesh export

@dataclass
class Mesh:
    vertices: np.ndarray
    normals: np.ndarray
    faces: np.ndarray
    attributes: dict
    skipped: int = 0


def export_mesh(surface: Surface, u_range, v_range, resolution=(32, 32), attributes=None) -> Mesh:
    """Triangulate a 2-parameter surface over a rectangle.

    Vertex normals are the Euclidean normals of the displayed embedding;
    ``theta`` is the warped-metric angle.  Cells touching a vertex that
    could not be evaluated are skipped and counted.
    """
    nu, nv = resolution
    us = np.linspace(*u_range, nu)
    vs = np.linspace(*v_range, nv)
    verts = np.full((nu, nv, 3), np.nan)
    thetas = np.full((nu, nv), np.nan)
    heights = np.full((nu, nv), np.nan)
    extra = {k: np.full((nu, nv), np.nan) for k in (attributes or {})}
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            try:
                param = surface.uv_param(u, v)
                x = surface.position(param)
                verts[i, j] = surface.display_point(x)
                thetas[i, j] = measured_angle(surface.ambient, x, surface.normal(param))
                heights[i, j] = x[0]
                for k, fn in (attributes or {}).items():
                    extra[k][i, j] = fn(param, x)
            except (DomainError, OutOfRegionError, SingularPointError, ValueError):
                continue
    du = np.gradient(verts, us, axis=0) if nu > 1 else np.zeros_like(verts)
    dv = np.gradient(verts, vs, axis=1) if nv > 1 else np.zeros_like(verts)
    nrm = np.cross(du, dv)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    faces = []
    skipped = 0
    idx = np.arange(nu * nv).reshape(nu, nv)
    flat = verts.reshape(-1, 3)
    for i in range(nu - 1):
        for j in range(nv - 1):
            quad = [idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]]
            if np.any(np.isnan(flat[quad])):
                skipped += 1
                continue
            for tri in ((quad[0], quad[1], quad[2]), (quad[0], quad[2], quad[3])):
                a, b, c = flat[list(tri)]
                if np.linalg.norm(np.cross(b - a, c - a)) <= 1e-14:
                    skipped += 1
                    continue
                faces.append(tri)
    attrs = {"theta": thetas.ravel(), "f": heights.ravel()}
    attrs.update({k: v.ravel() for k, v in extra.items()})
    return Mesh(flat, nrm.reshape(-1, 3), np.array(faces, int).reshape(-1, 3), attrs, skipped)
