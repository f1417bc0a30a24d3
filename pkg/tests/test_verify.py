import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cahs import (CylinderSurface, EuclideanFlat, GraphSurface, Hyperplane, ScalarField,
                  WarpedProduct, WarpingProfile, classify_minimal_ca, harmonic_eikonal_linearity,
                  level_set_mean_curvature, parallel_curvature_evolution, shape_report)
from cahs.base_manifold import Grid
from cahs.errors import FocalPointError, UnsupportedAmbientError
from cahs.verify import helicoid_surface

from conftest import hyperbolic_ambient, hyperbolic_field

FLAT = WarpedProduct(WarpingProfile.constant(1.0), EuclideanFlat(2))


def _grid(lo, hi, n):
    """``n`` nodes along the first axis; the step is shared by all axes."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    h = (hi[0] - lo[0]) / (n - 1)
    g = Grid(tuple(int(round(w / h)) + 1 for w in hi - lo), h, tuple(lo))
    return g, g.nodes()


def _affine(a, b=0.0):
    a = np.asarray(a, float)
    return ScalarField(lambda p: p @ a + b, lambda p: np.broadcast_to(a, p.shape).copy())


def test_linear_field_flat_level_sets():
    # roundoff in the Laplacian grows like eps |f| / h^2, so keep h moderate
    g, X = _grid([-1, -1], [1, 1], 21)
    geo = level_set_mean_curvature(3 * X[..., 0] + 4 * X[..., 1], g.h)
    assert np.nanmax(np.abs(geo.H)) <= 1e-12
    assert np.nanmax(np.abs(geo.laplacian)) <= 1e-12
    assert geo.n_critical == 0


def test_radial_level_sets_are_circles():
    g, X = _grid([0.5, 0.5], [1.5, 1.5], 201)
    r = np.hypot(X[..., 0], X[..., 1])
    geo = level_set_mean_curvature(r, g.h)
    ok = geo.valid
    assert np.max(np.abs(geo.H[ok] + 1 / r[ok])) <= 10 * g.h ** 2


def test_hyperbolic_level_sets_are_lines():
    g, X = _grid([-1, 0.1], [1, 2], 65)
    geo = level_set_mean_curvature(hyperbolic_field(1.0).value(X), g.h)
    assert np.nanmax(np.abs(geo.H)) <= 1e-10


def test_critical_points_masked():
    g, X = _grid([-1, -1], [1, 1], 21)
    geo = level_set_mean_curvature(X[..., 0] ** 2 + X[..., 1] ** 2, g.h)
    assert geo.n_critical == 1
    assert np.isnan(geo.H[10, 10])


def test_parallel_evolution_examples():
    assert np.all(parallel_curvature_evolution([0, 0, 0], 0.0, 7.0) == 0)
    assert parallel_curvature_evolution([1.0], 0.0, 0.5) == pytest.approx([2.0], abs=1e-15)
    R, d = 2.0, 0.3
    assert np.allclose(parallel_curvature_evolution([1 / R, 1 / R], 1.0, 1.0 + d),
                       1 / (R - d), atol=1e-15)


def test_focal_point_names_index():
    with pytest.raises(FocalPointError) as exc:
        parallel_curvature_evolution([0.5, 2.0, 1.0], 0.0, 0.5)
    assert exc.value.index == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=4),
       st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
def test_parallel_evolution_group_property(lam, d1, d2):
    lam = np.array(lam)
    one = parallel_curvature_evolution(lam, 0.0, d1 + d2)
    two = parallel_curvature_evolution(parallel_curvature_evolution(lam, 0.0, d1), 0.0, d2)
    assert np.allclose(one, two, rtol=1e-12, atol=1e-12)


def test_linearity_examples():
    g, X = _grid([-1, -1], [1, 1], 41)
    v = harmonic_eikonal_linearity(3 * X[..., 0] + 4 * X[..., 1], g.h, origin=g.origin)
    assert v.is_harmonic and v.is_eikonal and v.is_linear
    assert v.eikonal_constant == pytest.approx(5.0, abs=1e-12)
    assert np.allclose(v.coefficients[:2], [3, 4], atol=1e-12)

    g, X = _grid([0.5, 0.5], [1.5, 1.5], 81)
    v = harmonic_eikonal_linearity(np.hypot(X[..., 0], X[..., 1]), g.h, origin=g.origin)
    assert v.is_eikonal and not v.is_harmonic and not v.is_linear
    assert v.eikonal_constant == pytest.approx(1.0, abs=1e-3)

    g, X = _grid([-1, -1], [1, 1], 41)
    v = harmonic_eikonal_linearity(X[..., 0] ** 2 - X[..., 1] ** 2, g.h, origin=g.origin)
    assert v.is_harmonic and not v.is_eikonal and not v.is_linear


def test_linearity_underdetermined():
    with pytest.raises(ValueError):
        harmonic_eikonal_linearity(np.zeros((2, 2)), 0.1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(1e-9, 1e-4),
       st.integers(0, 2 ** 32 - 1))
def test_linearity_soundness_with_noise(abc, eps, seed):
    g, X = _grid([0, 0], [1, 2], 11)
    a, b, c = abc
    noise = np.random.default_rng(seed).uniform(-eps, eps, X.shape[:-1])
    f = a * X[..., 0] + b * X[..., 1] + c + noise
    diam = math.hypot(1, 2)
    v = harmonic_eikonal_linearity(f, g.h, tol_lin=eps * diam, origin=g.origin)
    assert v.is_linear
    assert v.residual <= eps * diam
    assert np.allclose(v.coefficients, [a, b, c], atol=10 * eps)


def test_harmonic_eikonal_inputs_are_linear(rng):
    # harmonic and eikonal grids in the suite are exactly the affine ones
    g, X = _grid([-1, 0], [1, 1], 33)
    for _ in range(20):
        a = rng.normal(size=2)
        v = harmonic_eikonal_linearity(X @ a + rng.normal(), g.h, origin=g.origin)
        assert v.is_harmonic and v.is_eikonal
        assert v.is_linear


def test_classify_plane_graph():
    surf = GraphSurface(_affine([1.0, 1.0]), FLAT)
    params = np.random.default_rng(1).uniform(-1, 1, (8, 2))
    c = classify_minimal_ca(surf, params)
    assert c.verdict == "Hyperplane"
    assert c.theta_mean == pytest.approx(math.atan(math.sqrt(2)), abs=1e-10)


def test_classify_cylinder_over_line():
    surf = CylinderSurface(Hyperplane(np.array([1.0, 0.0]), 0.0), FLAT)
    params = np.array([[t, 0.0, y] for t in (-1.0, 0.0, 2.0) for y in (-1.0, 0.5)])
    c = classify_minimal_ca(surf, params)
    assert c.verdict == "CylinderOverMinimal"
    assert c.slice_mean_curvature <= 1e-6


def test_classify_cylinder_over_circle_is_not_minimal():
    from cahs import SphereShell
    surf = CylinderSurface(SphereShell(np.zeros(2), 1.0), FLAT)
    c = classify_minimal_ca(surf, np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0]]))
    assert c.verdict == "NotMinimal"


def test_classify_helicoid():
    params = np.array([[u, v] for u in (0.3, 0.8, 1.5) for v in (0.0, 0.7, 2.0)])
    c = classify_minimal_ca(helicoid_surface(1.0), params)
    assert c.max_mean_curvature <= 1e-6
    assert c.verdict == "NotConstantAngle"


def test_classify_rejects_warped_ambient():
    surf = GraphSurface(hyperbolic_field(1.0), hyperbolic_ambient())
    with pytest.raises(UnsupportedAmbientError):
        classify_minimal_ca(surf, np.array([[0.0, 1.0]]))


def test_minimal_trace_and_lambda_T():
    rng = np.random.default_rng(3)
    n = np.array([0.6, 0.8])
    q = 0.1 * n + rng.uniform(-1, 1, (6, 1)) * np.array([-0.8, 0.6])
    cases = [(GraphSurface(_affine([0.4, -1.2], 0.3), FLAT), rng.uniform(-1, 1, (6, 2))),
             (CylinderSurface(Hyperplane(n, 0.1), FLAT), np.c_[rng.uniform(-1, 1, 6), q])]
    for surf, params in cases:
        for e in shape_report(surf, params).entries:
            assert abs(np.trace(e.matrix)) <= 1e-6
            # rho' = 0, so lambda_T vanishes on its own
            assert abs(e.lambda_T) <= 1e-6
