"""Transnormal functions ``f = h o d`` solving ``|grad f| = C * rho(f)``.

``h`` is the inverse of ``r(s) = int_{s0}^{s} dsigma / (C rho(sigma))``.  It is
tabulated on an adaptive grid, inverted by monotone cubic interpolation and
polished with a safeguarded Newton iteration.  A slow bracketing mode
(``method="oracle"``) re-derives every value with quadrature and Brent's
method for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import InvalidConstantError, OutOfRegionError, RangeError
from .warp import WarpingProfile, integral_to_endpoint, reciprocal_rho_integral

NEWTON_TOL = 1e-13


def _window(domain, s0):
    span = 10.0 * max(1.0, abs(s0))
    lo, hi = s0 - span, s0 + span
    if lo <= domain.lo:
        lo = domain.lo + 1e-6 * (s0 - domain.lo)
    if hi >= domain.hi:
        hi = domain.hi - 1e-6 * (domain.hi - s0)
    return lo, hi


class TransnormalBuilder:
    """Angle data ``(C = tan theta, s0)`` plus the tabulated ``h``.

    Give exactly one of ``C`` and ``theta``; if both are given they must
    satisfy ``C = tan(theta)`` to 1e-12.
    """

    def __init__(self, profile: WarpingProfile, C=None, s0=1.0, theta=None):
        if C is None and theta is None:
            raise InvalidConstantError("give C or theta")
        if theta is None:
            theta = math.atan(C)
        if C is None:
            C = math.tan(theta)
        if not 0 < theta < math.pi / 2:
            raise InvalidConstantError("theta must lie in (0, pi/2); theta = 0 is the slice case")
        if abs(C - math.tan(theta)) > 1e-12 * max(1.0, abs(C)):
            raise InvalidConstantError(f"C = {C} is not tan(theta) = {math.tan(theta)}")
        if not C > 0:
            raise InvalidConstantError("C must be positive")
        profile.domain.check(s0, "s0")
        self.profile = profile
        self.C = float(C)
        self.theta = float(theta)
        self.s0 = float(s0)
        self.r_range = (integral_to_endpoint(profile, self.C, self.s0, profile.domain.lo),
                        integral_to_endpoint(profile, self.C, self.s0, profile.domain.hi))
        self._build_table()

    def h_inverse(self, s, method="auto"):
        return reciprocal_rho_integral(self.profile, self.C, self.s0, s, method)

    def _build_table(self, tol=1e-8, max_nodes=4097):
        lo, hi = _window(self.profile.domain, self.s0)
        s = np.unique(np.r_[np.linspace(lo, hi, 65), self.s0])
        r = np.asarray(self.h_inverse(s), float)
        for _ in range(10):
            interp = PchipInterpolator(r, s)
            mid = 0.5 * (s[1:] + s[:-1])
            rmid = np.asarray(self.h_inverse(mid), float)
            bad = np.abs(interp(rmid) - mid) > tol * (hi - lo)
            if not bad.any() or s.size + bad.sum() > max_nodes:
                break
            s = np.sort(np.r_[s, mid[bad]])
            r = np.sort(np.r_[r, rmid[bad]])
        self.table_s = s
        self.table_r = r
        self._interp = PchipInterpolator(r, s)

    def h_prime(self, s):
        """``h'`` at ``r = h^{-1}(s)``, i.e. ``C * rho(s)``."""
        return self.C * np.asarray(self.profile.rho(s), float)

    def check_range(self, r):
        lo, hi = self.r_range
        r = np.asarray(r, float)
        if np.any(~((r > lo) & (r < hi))):
            raise RangeError(f"value outside the attainable range ({lo}, {hi}) of h^-1",
                             (lo, hi))

    def _expand(self, r, a, toward):
        """Move from ``a`` toward the domain end ``toward`` until ``h^-1`` passes ``r``."""
        step = max(1.0, abs(a))
        for k in range(1, 2000):
            if math.isfinite(toward):
                b = toward - (toward - a) * 0.5 ** k
            else:
                b = a + math.copysign(step * 2.0 ** k, toward)
            rb = self.h_inverse(b)
            if (toward > a and rb >= r) or (toward < a and rb <= r):
                return b
        raise RangeError("could not bracket h", self.r_range)


def invert_h(builder: TransnormalBuilder, r, method="table"):
    """``s = h(r)``: the solution of ``h^{-1}(s) = r``.

    Parameters
    ----------
    builder : TransnormalBuilder
    r : float or array_like
    method : {"table", "oracle"}
        ``"table"`` uses the monotone table and Newton polish;
        ``"oracle"`` brackets and runs Brent's method on the quadrature
        integral for every value.

    Raises
    ------
    RangeError
        If ``r`` lies outside the attainable interval, which is reported.
    """
    r_arr = np.asarray(r, float)
    builder.check_range(r_arr)
    flat = r_arr.ravel()
    if method == "oracle":
        out = np.array([_oracle(builder, x) for x in flat])
    elif method == "table":
        out = _table_newton(builder, flat)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = out.reshape(r_arr.shape)
    return float(out) if out.ndim == 0 else out


def _bracket(builder, x):
    S, R = builder.table_s, builder.table_r
    dom = builder.profile.domain
    if x < R[0]:
        return builder._expand(x, S[0], dom.lo), S[0]
    if x > R[-1]:
        return S[-1], builder._expand(x, S[-1], dom.hi)
    i = int(np.clip(np.searchsorted(R, x), 1, R.size - 1))
    return S[i - 1], S[i]


def _table_newton(builder, r):
    a = np.empty_like(r)
    b = np.empty_like(r)
    for i, x in enumerate(r):
        a[i], b[i] = _bracket(builder, x)
    s = np.where((r >= builder.table_r[0]) & (r <= builder.table_r[-1]),
                 builder._interp(np.clip(r, builder.table_r[0], builder.table_r[-1])),
                 0.5 * (a + b))
    s = np.clip(s, np.minimum(a, b), np.maximum(a, b))
    active = np.ones(r.size, bool)
    for _ in range(200):
        F = np.asarray(builder.h_inverse(s[active]), float) - r[active]
        done = np.abs(F) <= NEWTON_TOL * np.maximum(1.0, np.abs(r[active]))
        idx = np.flatnonzero(active)
        lo, hi = a[idx], b[idx]
        lo = np.where(F < 0, s[idx], lo)
        hi = np.where(F > 0, s[idx], hi)
        a[idx], b[idx] = lo, hi
        step = F * builder.h_prime(s[idx])
        new = s[idx] - step
        inside = (new > np.minimum(lo, hi)) & (new < np.maximum(lo, hi))
        new = np.where(inside, new, 0.5 * (lo + hi))
        collapsed = np.abs(hi - lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(s[idx]))
        s[idx] = np.where(done, s[idx], new)
        active[idx[done | collapsed]] = False
        if not active.any():
            break
    return s


def _oracle(builder, x):
    if x == 0:
        return builder.s0
    a, b = _bracket(builder, x)
    return brentq(lambda s: builder.h_inverse(s, "quad") - x, min(a, b), max(a, b),
                  xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


class TransnormalField:
    """``f = h o d`` for a distance field ``d``.

    ``side="positive"`` (default) evaluates only where ``d >= 0``;
    ``side="both"`` also uses the negative side of a signed distance.
    """

    def __init__(self, builder: TransnormalBuilder, distance, side="positive"):
        if side not in ("positive", "both"):
            raise ValueError("side must be 'positive' or 'both'")
        self.builder = builder
        self.distance = distance
        self.side = side

    @property
    def profile(self):
        return self.builder.profile

    @property
    def C(self):
        return self.builder.C

    def _d(self, p):
        d = np.asarray(self.distance.value(p), float)
        if np.any(np.isnan(d)):
            raise OutOfRegionError("point outside the distance field")
        if self.side == "positive" and np.any(d < 0):
            raise OutOfRegionError("point on the negative side of the seed")
        return d

    def value(self, p):
        return invert_h(self.builder, self._d(p))

    def gradient(self, p):
        d = self._d(p)
        f = np.asarray(invert_h(self.builder, d), float)
        g = np.asarray(self.distance.gradient(p), float)
        return np.expand_dims(self.builder.h_prime(f), -1) * g

    def rescaled_distance(self, p):
        """``h^{-1} o f``; recovers ``d``."""
        return self.builder.h_inverse(self.value(p))


def eval_f(field: TransnormalField, p):
    return field.value(p)


def grad_f(field: TransnormalField, p):
    """``(h' o d) grad d`` with ``h' = C rho(h(d))``."""
    return field.gradient(p)


@dataclass(frozen=True)
class ScalarField:
    """Arbitrary scalar field given by callables for value and gradient."""

    value: Callable
    gradient: Callable


@dataclass(frozen=True)
class ResidualStats:
    per_sample: np.ndarray
    max: float
    mean: float


def transnormal_residual(field, profile: WarpingProfile, C, samples) -> ResidualStats:
    """Relative residual ``| |grad f| - C rho(f) | / (C rho(f))`` over samples."""
    samples = np.asarray(samples, float)
    if samples.size == 0:
        raise ValueError("empty sample set")
    f = np.asarray(field.value(samples), float)
    g = np.linalg.norm(np.asarray(field.gradient(samples), float), axis=-1)
    target = C * np.asarray(profile(f), float)
    res = np.abs(g - target) / np.abs(target)
    return ResidualStats(res, float(np.max(res)), float(np.mean(res)))
