"""Warped products ``I x_rho P``: warping profiles, the product metric and
the covariant derivative identities used by the verification code.

Ambient points are pairs ``(t, p)`` with ``p`` a base point given in the
embedding coordinates of the base manifold (``R^n`` for flat bases, ``R^3``
for round spheres).  Ambient vectors are stored as ``(dt, base)`` where
``base`` is a coordinate vector tangent to the base at ``p``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, InvalidConstantError

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-13


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; either end may be infinite."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, t) -> np.ndarray | bool:
        t = np.asarray(t, dtype=float)
        inside = (t > self.lo) & (t < self.hi)
        return bool(inside) if inside.ndim == 0 else inside

    def check(self, t, what="t"):
        if not np.all(self.contains(t)):
            raise DomainError(f"{what} outside the open interval ({self.lo}, {self.hi})")

    def sample(self, n=64) -> np.ndarray:
        """Interior points spread over the interval (log-spaced toward infinite ends)."""
        lo, hi = self.lo, self.hi
        u = np.linspace(0.0, 1.0, n + 2)[1:-1]
        if math.isfinite(lo) and math.isfinite(hi):
            return lo + (hi - lo) * u
        if math.isfinite(lo):
            return lo + np.geomspace(1e-3, 1e3, n)
        if math.isfinite(hi):
            return hi - np.geomspace(1e-3, 1e3, n)[::-1]
        return np.sinh(np.linspace(-7.0, 7.0, n))


@dataclass(frozen=True)
class WarpingProfile:
    """The warping function ``rho: I -> R+`` together with ``rho'``.

    Use the constructors :meth:`constant`, :meth:`reciprocal`,
    :meth:`linear_over_sin`, :meth:`custom` or :meth:`from_samples`.
    ``rho'`` is cross-checked against a central difference at construction.
    """

    domain: Interval
    rho: Callable
    rho_prime: Callable
    kind: str = "custom"
    params: tuple = field(default=())

    def __post_init__(self):
        ts = self.domain.sample(64)
        vals = np.asarray(self.rho(ts), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("rho must be finite and positive on its domain")
        self._check_derivative(ts)

    def _check_derivative(self, ts):
        eps3 = np.finfo(float).eps ** (1.0 / 3.0)
        for t in ts:
            room = min(t - self.domain.lo, self.domain.hi - t)
            step = eps3 * min(max(1.0, abs(t)), room)
            # Richardson on two central differences; the step grows with |t|
            fd1 = (float(self.rho(t + step)) - float(self.rho(t - step))) / (2 * step)
            fd2 = (float(self.rho(t + step / 2)) - float(self.rho(t - step / 2))) / step
            fd = (4 * fd2 - fd1) / 3
            rp = float(self.rho_prime(t))
            scale = max(abs(rp), abs(float(self.rho(t))) / max(1.0, abs(t)))
            if abs(fd - rp) > 1e-6 * scale + 1e-12:
                raise ValueError(
                    f"rho_prime disagrees with a finite difference of rho at t={t:g}: "
                    f"{rp!r} vs {fd!r}")

    # constructors

    @classmethod
    def constant(cls, c=1.0, domain=None):
        c = float(c)
        if c <= 0:
            raise ValueError("constant warping value must be positive")
        return cls(domain or Interval(), lambda t: np.full_like(np.asarray(t, float), c),
                   lambda t: np.zeros_like(np.asarray(t, float)), "constant", (c,))

    @classmethod
    def reciprocal(cls):
        """``rho(t) = 1/t`` on ``(0, inf)``: the upper half-space model of hyperbolic space."""
        return cls(Interval(0.0, math.inf), lambda t: 1.0 / np.asarray(t, float),
                   lambda t: -1.0 / np.asarray(t, float) ** 2, "reciprocal", ())

    @classmethod
    def linear_over_sin(cls, theta):
        """``rho(t) = t / sin(theta)`` on ``(0, inf)``; with base ``S^2(sin theta)``
        this is Euclidean 3-space without the origin."""
        s = math.sin(theta)
        if not 0 < theta < math.pi:
            raise ValueError("theta must lie in (0, pi)")
        return cls(Interval(0.0, math.inf), lambda t: np.asarray(t, float) / s,
                   lambda t: np.full_like(np.asarray(t, float), 1.0 / s),
                   "linear_over_sin", (float(theta),))

    @classmethod
    def custom(cls, rho, rho_prime, domain=None):
        return cls(domain or Interval(), rho, rho_prime, "custom", ())

    @classmethod
    def from_samples(cls, t, rho, rho_prime):
        """Piecewise cubic Hermite profile through samples ``(t, rho(t), rho'(t))``."""
        t = np.asarray(t, float)
        spline = CubicHermiteSpline(t, np.asarray(rho, float), np.asarray(rho_prime, float),
                                    extrapolate=False)
        return cls(Interval(float(t[0]), float(t[-1])), spline, spline.derivative(),
                   "custom", ())

    @classmethod
    def from_csv(cls, path):
        """Read a profile from a CSV file with columns ``t, rho, rho_prime``."""
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        data = np.array([[float(x) for x in r[:3]] for r in rows])
        return cls.from_samples(data[:, 0], data[:, 1], data[:, 2])

    # evaluation

    def __call__(self, t):
        self.domain.check(t)
        return self.rho(t)

    def log_derivative(self, t):
        """``rho'(t) / rho(t)``."""
        self.domain.check(t)
        return np.asarray(self.rho_prime(t), float) / np.asarray(self.rho(t), float)

    def has_closed_form(self):
        return self.kind in ("constant", "reciprocal", "linear_over_sin")


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class WarpedProduct:
    profile: WarpingProfile
    base: object  # base_manifold.BaseManifold

    @property
    def dimension(self):
        return 1 + self.base.dimension

    @property
    def embed_dim(self):
        """Length of the ``(t, p)`` coordinate array."""
        return 1 + self.base.embed_dim

    def check_point(self, t, p):
        self.profile.domain.check(t)
        self.base.check_point(p)

    def metric_weights(self, t):
        """Diagonal of the coordinate metric at height ``t``."""
        r = float(self.profile(t))
        return np.r_[1.0, np.full(self.base.embed_dim, r * r)]

    def inner(self, t, u, v):
        """Warped inner product of coordinate arrays ``u, v = (dt, base...)``."""
        self.profile.domain.check(t)
        r = float(self.profile(t))
        return float(u[0] * v[0] + r * r * np.dot(u[1:], v[1:]))

    def norm(self, t, u):
        return math.sqrt(self.inner(t, u, u))

    def connection(self, t, p, y, z, dz):
        """Covariant derivative of a vector field ``Z`` along ``Y`` at ``(t, p)``.

        ``dz`` is the coordinate derivative of ``Z`` in direction ``Y``.  Uses
        the warped-product derivation formulas: ``nabla_dt dt = 0``,
        ``nabla_dt V = nabla_V dt = (rho'/rho) V`` and
        ``nabla_V W = nabla^P_V W - rho rho' <V, W>_P dt``.
        """
        r = float(self.profile(t))
        rp = float(self.profile.rho_prime(t))
        a, x = y[0], np.asarray(y[1:], float)
        b, w = z[0], np.asarray(z[1:], float)
        out = np.array(dz, dtype=float, copy=True)
        out[1:] = self.base.project_tangent(p, out[1:])
        out[0] -= r * rp * float(np.dot(x, w))
        out[1:] += (rp / r) * (a * w + b * x)
        return out


@dataclass(frozen=True)
class AmbientVector:
    """Tangent vector ``dt_component * d/dt + base_component`` at ``at = (t, p)``."""

    dt_component: float
    base_component: np.ndarray
    at: tuple

    @classmethod
    def from_array(cls, arr, at):
        arr = np.asarray(arr, float)
        return cls(float(arr[0]), arr[1:].copy(), (float(at[0]), np.asarray(at[1], float)))

    @classmethod
    def dt(cls, at, dim):
        return cls(1.0, np.zeros(dim), (float(at[0]), np.asarray(at[1], float)))

    def as_array(self):
        return np.r_[self.dt_component, self.base_component]

    def same_point(self, other):
        return (self.at[0] == other.at[0]
                and np.array_equal(np.asarray(self.at[1]), np.asarray(other.at[1])))

    def _check(self, other):
        if not self.same_point(other):
            raise ValueError("vectors are attached at different ambient points")

    def __add__(self, other):
        self._check(other)
        return AmbientVector.from_array(self.as_array() + other.as_array(), self.at)

    def __sub__(self, other):
        self._check(other)
        return AmbientVector.from_array(self.as_array() - other.as_array(), self.at)

    def __mul__(self, k):
        return AmbientVector(k * self.dt_component, k * self.base_component, self.at)

    __rmul__ = __mul__


def _check_attached(point, *vectors):
    t, p = point
    for v in vectors:
        if v.at[0] != t or not np.allclose(v.at[1], p, rtol=0, atol=0):
            raise ValueError("vector is not attached at the given ambient point")


def ambient_inner(product: WarpedProduct, point, u: AmbientVector, v: AmbientVector) -> float:
    """``ab + rho(t)^2 <X, Y>_P`` for ``u = (a, X)`` and ``v = (b, Y)``."""
    _check_attached(point, u, v)
    return product.inner(point[0], u.as_array(), v.as_array())


def ambient_dt_derivative(product: WarpedProduct, point, w: AmbientVector) -> AmbientVector:
    """Covariant derivative of ``d/dt`` in direction ``w``.

    The ``d/dt`` part of ``w`` contributes nothing (t-lines are geodesics);
    the base part ``W`` gives ``(rho'/rho) W``.
    """
    _check_attached(point, w)
    k = float(product.profile.log_derivative(point[0]))
    return AmbientVector(0.0, k * w.base_component, w.at)


# reciprocal integral  int_{s0}^{s} dsigma / (C rho(sigma))

def _closed_form(profile, C, s0, s):
    with np.errstate(divide="ignore"):
        if profile.kind == "constant":
            (c,) = profile.params
            return (s - s0) / (C * c)
        if profile.kind == "reciprocal":
            return (s * s - s0 * s0) / (2.0 * C)
        if profile.kind == "linear_over_sin":
            (theta,) = profile.params
            return math.sin(theta) / C * np.log(s / s0)
    raise ValueError(f"no closed form for profile kind {profile.kind!r}")


def _quad(profile, C, a, b):
    def integrand(sig):
        # rho may overflow far out on an infinite tail; 1/inf = 0 is the right value there
        with np.errstate(over="ignore"):
            return 1.0 / float(profile.rho(sig))

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                limit=200)
    return val / C


def reciprocal_rho_integral(profile: WarpingProfile, C: float, s0: float, s, method="auto"):
    """``h^{-1}(s) = int_{s0}^{s} dsigma / (C rho(sigma))``.

    Parameters
    ----------
    profile : WarpingProfile
    C : float
        Nonzero constant; ``C = tan(theta)`` for constant angle graphs.
    s0 : float
        Base value where the integral vanishes.
    s : float or array_like
    method : {"auto", "closed", "quad"}
        ``"auto"`` uses the closed form when the profile kind has one and
        adaptive Gauss-Kronrod quadrature otherwise.

    Returns
    -------
    float or ndarray
    """
    if C == 0 or not math.isfinite(C):
        raise InvalidConstantError("C must be a finite nonzero constant")
    profile.domain.check(s0, "s0")
    s_arr = np.asarray(s, dtype=float)
    profile.domain.check(s_arr, "s")
    if method == "auto":
        method = "closed" if profile.has_closed_form() else "quad"
    if method == "closed":
        out = _closed_form(profile, C, s0, s_arr)
    elif method == "quad":
        out = np.vectorize(lambda b: _quad(profile, C, s0, b), otypes=[float])(s_arr)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


def integral_to_endpoint(profile: WarpingProfile, C: float, s0: float, end: float) -> float:
    """Limit of the reciprocal integral as ``s`` tends to a domain endpoint.

    Returns ``+-inf`` when the integral diverges.
    """
    sign = 1.0 if end > s0 else -1.0
    if profile.has_closed_form():
        with np.errstate(divide="ignore", invalid="ignore"):
            val = float(_closed_form(profile, C, s0, np.float64(end)))
        return val if not math.isnan(val) else sign * math.copysign(math.inf, C)
    try:
        return _quad(profile, C, s0, end)
    except (integrate.IntegrationWarning, ZeroDivisionError, FloatingPointError):
        return sign * math.copysign(math.inf, C)
