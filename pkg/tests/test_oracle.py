import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stcf.convex1d import ConvexScalarFn
from stcf.geometry2d import Circle, IndicatorTerm
from stcf.oracle import grid_oracle, objective_value, subset_oracle
from stcf.quadform import INF, Quadratic, TruncatedQuadratic
from stcf.solver1d import TruncatedConvex


def tq1(a, b, c, lam):
    return TruncatedQuadratic(Quadratic([[a]], [b], c), lam)


def test_objective_value_mixed_types():
    quad = tq1(8.0, 0.0, 1.0, 3.0)                      # min{4x^2 + 1, 3}
    gen = TruncatedConvex(ConvexScalarFn(f=math.exp, df=math.exp), 2.0)
    assert objective_value([quad, gen], [0.0]) == pytest.approx(1.0 + 1.0)
    assert objective_value([quad, gen], [10.0]) == pytest.approx(3.0 + 2.0)


def test_objective_value_indicator():
    disk = IndicatorTerm(Circle(np.array([1.0, 0.0]), 1.0), 2.5)
    assert objective_value([disk], [1.0, 0.5]) == -2.5
    assert objective_value([disk], [5.0, 0.0]) == 0.0


def test_subset_oracle_matches_worked_pair():
    f1 = tq1(8.0, 0.0, 1.0, 3.0)
    f2 = tq1(4.0, -4.0, 4.0, 4.0)
    sol = subset_oracle([f1, f2])
    assert_allclose(sol.value, 13.0 / 3.0, atol=1e-12)
    assert_allclose(sol.x, [1.0 / 3.0], atol=1e-12)
    assert sol.active == frozenset({0, 1})
    assert sol.pieces_visited == 4


def test_subset_oracle_base_terms_always_join():
    base = tq1(2.0, -2.0, 0.0, INF)
    cut = tq1(2.0, 2.0, 0.0, 0.1)
    sol = subset_oracle([base, cut])
    assert 0 in sol.active
    # direct check against a fine grid
    gx, gv = grid_oracle([base, cut], -5.0, 5.0, 20001)
    assert sol.value <= gv + 1e-9
    assert abs(sol.value - gv) < 1e-5


def test_subset_oracle_generic_1d_terms():
    gen = TruncatedConvex(
        ConvexScalarFn(f=lambda x: math.exp(x) - x, df=lambda x: math.exp(x) - 1.0),
        1.5)
    anchor = tq1(2.0, -4.0, 0.0, INF)
    sol = subset_oracle([gen, anchor])
    gx, gv = grid_oracle([gen, anchor], -10.0, 10.0, 200001)
    assert sol.value == pytest.approx(gv, abs=1e-6)


def test_subset_oracle_2d():
    A = np.eye(2) * 2.0
    sunk = TruncatedQuadratic(Quadratic(A, np.zeros(2), -1.0), 0.0)
    far = TruncatedQuadratic(Quadratic(A, np.array([-8.0, 0.0]), 16.0 - 1.5), 0.0)
    sol = subset_oracle([sunk, far])
    assert_allclose(sol.value, -1.5)
    assert sol.active == frozenset({1})
    assert_allclose(sol.x, [4.0, 0.0], atol=1e-12)


def test_subset_oracle_rejects_indicators_and_caps_terms():
    with pytest.raises(ValueError):
        subset_oracle([IndicatorTerm(Circle(np.zeros(2), 1.0), 1.0)])
    many = [tq1(2.0, float(i), 0.0, 1.0) for i in range(21)]
    with pytest.raises(ValueError):
        subset_oracle(many)


def test_subset_oracle_dim_mismatch():
    with pytest.raises(ValueError):
        subset_oracle([tq1(2.0, 0.0, 0.0, 1.0),
                       TruncatedQuadratic(Quadratic(np.eye(2), np.zeros(2), 0.0), 1.0)])


def test_subset_oracle_empty():
    sol = subset_oracle([])
    assert sol.value == 0.0
    assert sol.active == frozenset()


def test_grid_oracle_bounds_subset_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        terms = []
        for _k in range(4):
            m = rng.uniform(-2.0, 2.0)
            a = rng.uniform(0.5, 4.0)
            z = rng.uniform(-1.0, 1.0)
            terms.append(tq1(a, -a * m, 0.5 * a * m * m + z, float(rng.uniform(0.0, 1.5))))
        sol = subset_oracle(terms)
        gx, gv = grid_oracle(terms, -4.0, 4.0, 4001)
        # the grid can only overshoot the true minimum
        assert gv >= sol.value - 1e-12
        assert gv - sol.value < 1e-4


def test_grid_oracle_validation():
    with pytest.raises(ValueError):
        grid_oracle([], [0.0], [1.0, 2.0], 10)
    with pytest.raises(ValueError):
        grid_oracle([], 0.0, 1.0, 1)
