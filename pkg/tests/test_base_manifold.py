import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cahs import (AnalyticDistance, EuclideanFlat, Grid, Hyperplane, PlaneCurve, RoundSphere2,
                  SphereShell, SphericalCurve, distance_analytic, distance_value, grad_field)
from cahs.errors import OutOfRegionError, SingularPointError


def test_hyperplane_distance_is_last_coordinate():
    seed = Hyperplane(np.array([0.0, 0.0, 1.0]), 0.0)
    p = np.array([0.3, -2.0, 0.7])
    d, g = distance_analytic(seed, p)
    assert d == 0.7
    assert np.array_equal(g, [0, 0, 1.0])


def test_hyperplane_normal_must_be_unit():
    with pytest.raises(ValueError):
        Hyperplane(np.array([0.0, 2.0]), 0.0)


def test_sphere_shell_radial():
    seed = SphereShell(np.zeros(3), 1.0)
    d, g = distance_analytic(seed, np.array([2.0, 0, 0]))
    assert d == 1.0
    assert np.allclose(g, [1, 0, 0])


def test_sphere_shell_center_singular():
    with pytest.raises(SingularPointError):
        distance_analytic(SphereShell(np.zeros(2), 1.0), np.zeros(2))


def test_equator_to_north_pole():
    eq = SphericalCurve.great_circle((0, 0, 1), 1.0)
    assert distance_value(eq, np.array([0, 0, 1.0])) == pytest.approx(math.pi / 2, abs=1e-12)
    # brute force over dense samples of the equator
    v = np.linspace(0, 2 * math.pi, 20000, endpoint=False)
    pts = np.c_[np.cos(v), np.sin(v), np.zeros_like(v)]
    p = np.array([0.3, -0.4, 0.5])
    p /= np.linalg.norm(p)
    brute = np.min(np.arccos(np.clip(pts @ p, -1, 1)))
    assert distance_value(eq, p) == pytest.approx(brute, abs=1e-8)
    with pytest.raises(SingularPointError):
        distance_analytic(eq, np.array([0, 0, 1.0]))


def test_spherical_curve_rejects_off_sphere():
    v = np.linspace(0, 2 * math.pi, 10, endpoint=False)
    with pytest.raises(ValueError):
        SphericalCurve(1.0, 1.1 * np.c_[np.cos(v), np.sin(v), 0 * v], v)


def test_spherical_curve_spline_fallback():
    v = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    lat = 0.4
    pts = np.c_[math.cos(lat) * np.cos(v), math.cos(lat) * np.sin(v), math.sin(lat) + 0 * v]
    curve = SphericalCurve(1.0, pts, v)
    p = np.array([1.0, 0.2, 0.1])
    p /= np.linalg.norm(p)
    exact = abs(math.asin(p[2]) - lat)
    assert abs(distance_value(curve, p)) == pytest.approx(exact, abs=1e-7)


def test_plane_curve_circle():
    circle = PlaneCurve.from_function(lambda v: np.array([math.cos(v), math.sin(v)]),
                                      lambda v: np.array([-math.sin(v), math.cos(v)]))
    p = np.array([1.5, 0.8])
    d, g = distance_analytic(circle, p)
    assert d == pytest.approx(np.linalg.norm(p) - 1, abs=1e-13)
    assert np.allclose(g, p / np.linalg.norm(p), atol=1e-12)
    assert distance_value(circle, np.array([0.2, 0.1])) < 0


def test_sphere_exp_stays_on_sphere():
    S = RoundSphere2(0.7)
    p = np.array([0, 0, 0.7])
    q = S.exp(p, np.array([0.3, 0.1, 0.0]))
    assert np.linalg.norm(q) == pytest.approx(0.7)
    assert math.acos(np.dot(p, q) / 0.49) * 0.7 == pytest.approx(math.hypot(0.3, 0.1))


def test_grid_rejects_non_uniform():
    with pytest.raises(ValueError):
        Grid.box([0, 0], [1, 2], 5)


def test_grad_field_outside_region():
    field = AnalyticDistance(SphereShell(np.zeros(2), 1.0), EuclideanFlat(2), tube_radius=0.5)
    assert np.allclose(grad_field(field, np.array([1.2, 0])), [1, 0])
    with pytest.raises(OutOfRegionError):
        grad_field(field, np.array([2.0, 0]))


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-2, 2), y=st.floats(-2, 2))
def test_unit_gradient_in_validity_region(x, y):
    field = AnalyticDistance(SphereShell(np.zeros(2), 1.0), EuclideanFlat(2))
    p = np.array([x, y])
    if np.linalg.norm(p) < 0.05:
        return
    assert field.is_valid(p)
    assert abs(np.linalg.norm(field.gradient(p)) - 1) <= field.tau
    assert abs(field.fd_gradient_norm(p) - 1) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(lat=st.floats(-1.2, 1.2), lon=st.floats(0, 6.28))
def test_spherical_distance_unit_gradient(lat, lon):
    seed = SphericalCurve.great_circle((0, 0, 1), 2.0)
    field = AnalyticDistance(seed, RoundSphere2(2.0))
    p = 2.0 * np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])
    d, g = field.value_and_gradient(p)
    assert d == pytest.approx(2.0 * lat, abs=1e-10)
    assert abs(np.linalg.norm(g) - 1) < 1e-12
    assert abs(np.dot(g, p)) < 1e-12
