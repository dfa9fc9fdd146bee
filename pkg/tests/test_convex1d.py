import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from stcf.convex1d import (ConvexDivergenceError, ConvexScalarFn,
                           crossing_interval, minimize_convex_sum,
                           quadratic_fn)

INF = math.inf


def exp_fn(a=1.0, b=0.0):
    """exp(a x) + b x as a ConvexScalarFn."""
    return ConvexScalarFn(
        f=lambda x: math.exp(min(a * x, 700.0)) + b * x,
        df=lambda x: a * math.exp(min(a * x, 700.0)) + b,
        d2f=lambda x: a * a * math.exp(min(a * x, 700.0)),
        hint=0.0,
    )


def test_minimize_single_quadratic():
    m = minimize_convex_sum([quadratic_fn(6.0, -2.0, 5.0)])
    assert m.kind == "interior"
    assert_allclose(m.x, 1.0 / 3.0, rtol=1e-9)
    assert_allclose(m.value, 5.0 - 1.0 / 3.0, rtol=1e-12)


def test_minimize_exp_pair_known_minimum():
    # exp(x) - 2x plus exp(x) - 4x: minimum of 2 exp(x) - 6x at x = log 3
    fns = [exp_fn(1.0, -2.0), exp_fn(1.0, -4.0)]
    m = minimize_convex_sum(fns)
    assert_allclose(m.x, math.log(3.0), rtol=1e-9)
    assert_allclose(m.value, 6.0 - 6.0 * math.log(3.0), rtol=1e-10)


def test_minimize_with_quad_fast_path():
    # coefficient channel uses the 0.5*a*x^2 + b*x + c convention:
    # (12, -4, -2) is 6x^2 - 4x - 2 with minimum -8/3 at 1/3
    m = minimize_convex_sum([], quad=(12.0, -4.0, -2.0))
    assert_allclose(m.x, 1.0 / 3.0, rtol=1e-12)
    assert_allclose(m.value, -8.0 / 3.0, rtol=1e-12)


def test_monotone_decreasing_infimum_toward_minus_inf():
    # exp(x): infimum 0 toward -inf; the witness is a far finite point
    # where the infimum is attained to machine precision
    m = minimize_convex_sum([exp_fn(1.0, 0.0)])
    assert m.value <= 1e-300
    assert m.x < -200.0


def test_monotone_increasing_infimum_toward_plus_inf():
    m = minimize_convex_sum([exp_fn(-1.0, 0.0)])
    assert m.value <= 1e-300
    assert m.x > 200.0


def test_unbounded_linear_raises():
    lin = ConvexScalarFn(f=lambda x: -2.0 * x, df=lambda x: -2.0, d2f=lambda x: 0.0)
    with pytest.raises(ConvexDivergenceError):
        minimize_convex_sum([lin])


def test_crossing_interval_quadratic_exact_roots():
    # 4x^2 + 1 crosses 3 at +/- 1/sqrt(2)
    iv = crossing_interval(quadratic_fn(8.0, 0.0, 1.0), 3.0)
    assert_allclose(iv, (-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)), rtol=1e-9)


def test_crossing_interval_none_above_min():
    assert crossing_interval(quadratic_fn(2.0, 0.0, 5.0), 4.0) is None


def test_crossing_interval_tangent_point():
    iv = crossing_interval(quadratic_fn(2.0, 0.0, 5.0), 5.0)
    assert iv is not None
    l, r = iv
    assert_allclose(l, 0.0, atol=1e-9)
    assert l == r


def test_crossing_interval_half_line_for_monotone():
    # exp(x) <= e on (-inf, 1]
    iv = crossing_interval(exp_fn(1.0, 0.0), math.e)
    assert iv[0] == -INF
    assert_allclose(iv[1], 1.0, rtol=1e-9)


def test_crossing_interval_steep_exponential():
    # descending an exponential from far above the level must not stall
    f = exp_fn(0.877, 0.0)
    iv = crossing_interval(f, 2.9876)
    assert iv[0] == -INF
    assert_allclose(f(iv[1]), 2.9876, rtol=1e-9)


def test_crossing_interval_poisson_style_level():
    # exp(x) - 3x <= 3 - 3 log 3 + lam around x = log 3
    lam = 2.0
    level = 3.0 - 3.0 * math.log(3.0) + lam
    fn = ConvexScalarFn(
        f=lambda x: math.exp(min(x, 700.0)) - 3.0 * x,
        df=lambda x: math.exp(min(x, 700.0)) - 3.0,
        hint=math.log(3.0),
    )
    l, r = crossing_interval(fn, level)
    assert l < math.log(3.0) < r
    assert_allclose(fn(l), level, rtol=1e-8)
    assert_allclose(fn(r), level, rtol=1e-8)


@given(a=st.floats(0.1, 50.0), b=st.floats(-40.0, 40.0), c=st.floats(-5.0, 5.0),
       level_off=st.floats(0.1, 30.0))
@settings(max_examples=60, deadline=None)
def test_crossing_interval_residual_property(a, b, c, level_off):
    fn = quadratic_fn(a, b, c)
    vmin = c - b * b / (2.0 * a)
    level = vmin + level_off
    l, r = crossing_interval(fn, level)
    tol = 1e-8 * (1.0 + abs(level))
    assert abs(fn(l) - level) <= tol
    assert abs(fn(r) - level) <= tol
    assert l <= r


@given(st.lists(st.tuples(st.floats(0.1, 20.0), st.floats(-10.0, 10.0),
                          st.floats(-3.0, 3.0)), min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_minimize_sum_is_a_lower_bound_nearby(coeffs):
    fns = [quadratic_fn(a, b, c) for a, b, c in coeffs]
    m = minimize_convex_sum(fns)
    total = lambda x: sum(f(x) for f in fns)
    for dx in (-0.37, 0.0, 0.41, 2.3):
        assert m.value <= total(m.x + dx) + 1e-7 * (1.0 + abs(m.value))
