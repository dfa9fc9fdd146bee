import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stcf.geometry2d import (Circle, ConvexPolygon, Ellipse, GeometryError,
                             IndicatorTerm, Strip, boundary_of, components_of,
                             contains, intersect, region_contains, sort_along)
from stcf.quadform import INF, Quadratic, TruncatedQuadratic


def tq2(A, b, c, lam):
    return TruncatedQuadratic(Quadratic(A, b, c), lam)


# ---------------------------------------------------------------------------
# boundary classification

def test_boundary_isotropic_is_circle():
    # 0.5 * 2 |x - (1, -2)|^2 <= 4  ->  circle of radius 2
    t = tq2([[2.0, 0.0], [0.0, 2.0]], [-2.0, 4.0], 5.0, 4.0)
    curve = boundary_of(t)
    assert isinstance(curve, Circle)
    assert_allclose(curve.center, [1.0, -2.0])
    assert_allclose(curve.r, 2.0)


def test_boundary_anisotropic_is_ellipse():
    # x^2 + 4 y^2 <= 4: semi-axes 2 and 1, major axis along x
    t = tq2([[2.0, 0.0], [0.0, 8.0]], [0.0, 0.0], 0.0, 4.0)
    curve = boundary_of(t)
    assert isinstance(curve, Ellipse)
    assert_allclose(curve.center, [0.0, 0.0], atol=1e-14)
    assert_allclose([curve.a, curve.b], [2.0, 1.0])
    assert curve.theta == pytest.approx(0.0, abs=1e-12)


def test_boundary_rotated_ellipse_angle():
    th = 0.3
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    A = R @ np.diag([2.0, 8.0]) @ R.T
    curve = boundary_of(tq2(A, [0.0, 0.0], 0.0, 4.0))
    assert isinstance(curve, Ellipse)
    assert curve.theta == pytest.approx(th, abs=1e-12)
    assert_allclose([curve.a, curve.b], [2.0, 1.0])


def test_boundary_untruncated_is_none():
    assert boundary_of(tq2([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 0.0, INF)) is None


def test_boundary_empty_region_is_none():
    # minimum value 5 sits above the truncation level 4
    assert boundary_of(tq2([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 5.0, 4.0)) is None


def test_boundary_rank1_is_strip():
    # 0.5 * 2 x^2 <= 1  ->  -1 <= x <= 1, normal (1, 0)
    curve = boundary_of(tq2([[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], 0.0, 1.0))
    assert isinstance(curve, Strip)
    assert_allclose(curve.normal, [1.0, 0.0], atol=1e-14)
    assert_allclose([curve.lo, curve.hi], [-1.0, 1.0])


def test_boundary_rank1_cross_linear_raises():
    # curvature along x, slope along y: parabolic level set, unbounded below
    with pytest.raises(GeometryError):
        boundary_of(tq2([[2.0, 0.0], [0.0, 0.0]], [0.0, 1.0], 0.0, 1.0))


def test_boundary_indefinite_raises():
    with pytest.raises(GeometryError):
        boundary_of(tq2([[2.0, 0.0], [0.0, -2.0]], [0.0, 0.0], 0.0, 1.0))


def test_boundary_constant_term_is_none():
    assert boundary_of(tq2([[0.0, 0.0], [0.0, 0.0]], [0.0, 0.0], 0.5, 1.0)) is None


def test_boundary_truncated_linear_raises():
    with pytest.raises(GeometryError):
        boundary_of(tq2([[0.0, 0.0], [0.0, 0.0]], [1.0, 0.0], 0.0, 1.0))


def test_boundary_wrong_dim_raises():
    with pytest.raises(GeometryError):
        boundary_of(TruncatedQuadratic(Quadratic([[2.0]], [0.0], 0.0), 1.0))


# ---------------------------------------------------------------------------
# membership

def test_contains_closed_set_boundary_point():
    t = tq2([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 0.0, 1.0)  # unit disk
    assert contains(t, [1.0, 0.0])
    assert contains(t, [0.0, 0.0])
    assert not contains(t, [1.001, 0.0])
    assert contains(tq2([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 0.0, INF), [1e6, 1e6])


def test_region_contains_each_kind():
    assert region_contains(Circle(np.array([1.0, 1.0]), 1.0), [1.0, 2.0])
    assert not region_contains(Circle(np.array([1.0, 1.0]), 1.0), [3.0, 1.0])
    ell = Ellipse(np.zeros(2), 2.0, 1.0, 0.0)
    assert region_contains(ell, [2.0, 0.0])
    assert not region_contains(ell, [0.0, 1.5])
    strip = Strip(np.array([1.0, 0.0]), -1.0, 1.0)
    assert region_contains(strip, [1.0, 100.0])
    assert not region_contains(strip, [1.5, 0.0])
    tri = ConvexPolygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert region_contains(tri, [0.25, 0.25])
    assert region_contains(tri, [0.5, 0.5])  # on the hypotenuse
    assert not region_contains(tri, [0.6, 0.6])


def test_polygon_validation():
    with pytest.raises(GeometryError):
        ConvexPolygon([[0.0, 0.0], [1.0, 0.0]])  # too few vertices
    with pytest.raises(GeometryError):
        ConvexPolygon([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])  # clockwise
    with pytest.raises(GeometryError):
        # reflex corner
        ConvexPolygon([[0.0, 0.0], [2.0, 0.0], [1.0, 0.1], [2.0, 2.0]])


def test_indicator_term_validation():
    IndicatorTerm(Circle(np.zeros(2), 1.0), 2.0)
    with pytest.raises(GeometryError):
        IndicatorTerm(Circle(np.zeros(2), 1.0), -1.0)
    with pytest.raises(GeometryError):
        IndicatorTerm(Circle(np.zeros(2), 1.0), 1.0, lam=0.5)
    with pytest.raises(GeometryError):
        IndicatorTerm(Strip(np.array([1.0, 0.0]), -1.0, 1.0), 1.0)


# ---------------------------------------------------------------------------
# intersections

def test_circle_circle_two_points():
    pts = intersect(Circle(np.zeros(2), 1.0), Circle(np.array([1.0, 0.0]), 1.0))
    assert pts.shape == (2, 2)
    assert_allclose(pts[:, 0], [0.5, 0.5])
    assert_allclose(sorted(pts[:, 1]), [-math.sqrt(3) / 2, math.sqrt(3) / 2])


def test_circle_circle_tangent_and_disjoint():
    tangent = intersect(Circle(np.zeros(2), 1.0), Circle(np.array([2.0, 0.0]), 1.0))
    assert tangent.shape[0] == 1
    assert_allclose(tangent[0], [1.0, 0.0], atol=1e-9)
    assert intersect(Circle(np.zeros(2), 1.0), Circle(np.array([5.0, 0.0]), 1.0)).shape == (0, 2)
    # coincident circles share every point; report none
    assert intersect(Circle(np.zeros(2), 1.0), Circle(np.zeros(2), 1.0)).shape == (0, 2)


def test_ellipse_ellipse_four_points():
    # x^2/4 + y^2 = 1 and x^2 + y^2/4 = 1 cross at (+-2/sqrt 5, +-2/sqrt 5)
    e1 = Ellipse(np.zeros(2), 2.0, 1.0, 0.0)
    e2 = Ellipse(np.zeros(2), 2.0, 1.0, math.pi / 2)
    pts = intersect(e1, e2)
    assert pts.shape == (4, 2)
    s = 2.0 / math.sqrt(5.0)
    expected = np.array(sorted([(-s, -s), (-s, s), (s, -s), (s, s)]))
    assert_allclose(pts, expected, atol=1e-9)


def test_strip_circle_four_points():
    strip = Strip(np.array([1.0, 0.0]), -0.5, 0.5)
    pts = intersect(strip, Circle(np.zeros(2), 1.0))
    assert pts.shape == (4, 2)
    h = math.sqrt(0.75)
    assert_allclose(np.abs(pts[:, 0]), 0.5)
    assert_allclose(sorted(np.abs(pts[:, 1])), [h, h, h, h])


def test_polygon_circle_eight_points():
    square = ConvexPolygon([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    pts = intersect(square, Circle(np.zeros(2), 1.2))
    assert pts.shape == (8, 2)
    h = math.sqrt(1.2 ** 2 - 1.0)
    on_edge = np.isclose(np.abs(pts), 1.0, atol=1e-9)
    assert np.all(on_edge.any(axis=1))
    other = np.where(on_edge[:, 0], pts[:, 1], pts[:, 0])
    assert_allclose(np.abs(other), h)


def test_intersections_satisfy_both_level_equations():
    rng = np.random.default_rng(7)
    for _ in range(25):
        terms = []
        for _k in range(2):
            th = rng.uniform(0.0, math.pi)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            A = R @ np.diag(rng.uniform(0.5, 4.0, size=2)) @ R.T
            m = rng.uniform(-2.0, 2.0, size=2)
            q = Quadratic(A, -A @ m, 0.5 * float(m @ A @ m))
            terms.append(TruncatedQuadratic(q, float(rng.uniform(0.5, 3.0))))
        curves = [boundary_of(t) for t in terms]
        pts = intersect(curves[0], curves[1])
        for p in pts:
            for t in terms:
                assert abs(t.q(p) - t.lam) <= 1e-6 * (1.0 + abs(t.lam))


def test_sort_along_circle_is_clockwise():
    circle = Circle(np.zeros(2), 1.0)
    angles = [0.1, 2.0, 4.0, 5.5]
    pts = [np.array([math.cos(a), math.sin(a)]) for a in angles]
    (ordered,) = sort_along(circle, pts)
    keys = [cp.arc_key for cp in ordered]
    assert keys == sorted(keys)
    comp = components_of(circle)[0]
    for cp in ordered:
        assert_allclose(comp.point_at(cp.arc_key), cp.point, atol=1e-12)
    # on a circle the key is the negated polar angle, so walking ascending
    # keys moves clockwise
    expected = sorted((-a) % (2 * math.pi) for a in angles)
    assert_allclose(keys, expected, atol=1e-12)


def test_sort_along_strip_groups_by_line():
    strip = Strip(np.array([1.0, 0.0]), -1.0, 1.0)
    pts = [np.array([-1.0, 3.0]), np.array([1.0, -2.0]), np.array([-1.0, 0.0])]
    groups = sort_along(strip, pts)
    assert len(groups) == 2
    sizes = sorted(len(g) for g in groups)
    assert sizes == [1, 2]
