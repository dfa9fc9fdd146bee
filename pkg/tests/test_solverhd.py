import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stcf.convex1d import ConvexScalarFn
from stcf.oracle import subset_oracle
from stcf.quadform import INF, Quadratic, TruncatedQuadratic
from stcf.solverhd import (CompositeConvexTerm, SparseTerm, SparseTruncatedSum,
                           minimize_ccd)


def tq(a, b, c, lam):
    return TruncatedQuadratic(Quadratic(np.atleast_2d(a), np.atleast_1d(b), c), lam)


def chain_sum(y, w, lam):
    """Data-fit terms plus truncated first-difference couplers."""
    d = len(y)
    terms = [SparseTerm((j,), tq(2.0, -2.0 * y[j], y[j] * y[j], INF))
             for j in range(d)]
    A = np.array([[2.0 * w, -2.0 * w], [-2.0 * w, 2.0 * w]])
    for j in range(d - 1):
        terms.append(SparseTerm((j, j + 1),
                                TruncatedQuadratic(Quadratic(A, np.zeros(2), 0.0),
                                                   w * lam)))
    return SparseTruncatedSum(d, terms)


def test_sparse_term_validation():
    with pytest.raises(ValueError):
        SparseTerm((), tq(2.0, 0.0, 0.0, INF))
    with pytest.raises(ValueError):
        SparseTerm((2, 1), TruncatedQuadratic(Quadratic(np.eye(2), np.zeros(2), 0.0), INF))
    with pytest.raises(ValueError):
        SparseTerm((0, 1), tq(2.0, 0.0, 0.0, INF))  # dim mismatch
    with pytest.raises(ValueError):
        SparseTruncatedSum(2, [SparseTerm((5,), tq(2.0, 0.0, 0.0, INF))])


def test_flat_direction_with_linear_part_rejected():
    # truncated rank-1 term with a slope across the flat direction
    A = np.array([[2.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        SparseTruncatedSum(2, [SparseTerm((0, 1),
                               TruncatedQuadratic(Quadratic(A, [0.0, 1.0], 0.0), 1.0))])
    # the same term untruncated is allowed (it may be bounded in the sum)
    SparseTruncatedSum(2, [SparseTerm((0, 1),
                           TruncatedQuadratic(Quadratic(A, [0.0, 1.0], 0.0), INF))])


def test_value_and_active_mask():
    s = chain_sum(np.array([0.0, 10.0]), w=1.0, lam=4.0)
    x = np.array([0.0, 10.0])
    # both data terms fit exactly; the coupler is truncated: (10-0)^2 > 4
    assert s.value(x) == pytest.approx(4.0)
    mask = s.active_mask(x)
    assert mask.tolist() == [True, True, False]


def test_kernel_matches_generic_path():
    rng = np.random.default_rng(11)
    y = rng.normal(size=12)
    squad = chain_sum(y, w=2.0, lam=1.0)
    # generic twin: same couplers expressed as composite |u . x|^2 terms
    terms = [SparseTerm((j,), tq(2.0, -2.0 * y[j], y[j] * y[j], INF))
             for j in range(12)]
    for j in range(11):
        h = ConvexScalarFn(f=lambda t: 2.0 * t * t, df=lambda t: 4.0 * t,
                           d2f=lambda t: 4.0)
        terms.append(SparseTerm((j, j + 1),
                                CompositeConvexTerm(np.array([1.0, -1.0]), h, 2.0)))
    sgen = SparseTruncatedSum(12, terms)
    assert squad.all_quadratic and not sgen.all_quadratic
    a = minimize_ccd(squad, x0=y)
    b = minimize_ccd(sgen, x0=y)
    assert_allclose(a.x, b.x, atol=1e-6)
    assert a.value == pytest.approx(b.value, abs=1e-8)


def test_monotone_objective_trace():
    rng = np.random.default_rng(5)
    y = rng.normal(size=30) + np.where(np.arange(30) > 15, 4.0, 0.0)
    s = chain_sum(y, w=3.0, lam=0.5)
    sol = minimize_ccd(s, x0=y, trace=True)
    trace = sol.info["objective_trace"]
    assert len(trace) >= 1
    diffs = np.diff(trace)
    assert np.all(diffs <= 1e-10)
    assert sol.info["converged"]
    assert sol.value == pytest.approx(trace[-1], abs=1e-9)


def test_touched_counter_scales_with_slices():
    # every cycle on a chain of length d rebuilds ~3d slices (two couplers
    # plus one data term per interior coordinate)
    y = np.zeros(50)
    s = chain_sum(y, w=1.0, lam=1.0)
    sol = minimize_ccd(s, x0=y)
    per_cycle = sol.info["touched"] / max(sol.iterations, 1)
    assert 2.0 * 50 <= per_cycle <= 3.0 * 50


def test_matches_global_oracle_in_2d():
    # dense 2-D instances: CCD from the untruncated minimizer often finds
    # the global minimum, and must never report anything below it
    rng = np.random.default_rng(23)
    hits = 0
    for _ in range(10):
        terms2 = []
        sterms = []
        for _k in range(4):
            th = rng.uniform(0.0, math.pi)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            A = R @ np.diag(rng.uniform(0.5, 3.0, size=2)) @ R.T
            m = rng.uniform(-2.0, 2.0, size=2)
            q = Quadratic(A, -A @ m, 0.5 * float(m @ A @ m) + rng.uniform(-1.0, 0.5))
            lam = float(rng.uniform(0.2, 1.5))
            terms2.append(TruncatedQuadratic(q, lam))
            sterms.append(SparseTerm((0, 1), terms2[-1]))
        brute = subset_oracle(terms2)
        sol = minimize_ccd(SparseTruncatedSum(2, sterms), x0=brute.x)
        assert sol.value >= brute.value - 1e-9
        if sol.value <= brute.value + 1e-7:
            hits += 1
    assert hits == 10  # seeded at the optimum, CCD must not move away


def test_x0_length_checked():
    s = chain_sum(np.zeros(4), w=1.0, lam=1.0)
    with pytest.raises(ValueError):
        minimize_ccd(s, x0=np.zeros(3))


def test_composite_slice_matches_direct_evaluation():
    # h(w . x) sliced along x_1 equals the same scalar function shifted
    h = ConvexScalarFn(f=lambda t: math.exp(t) - t,
                       df=lambda t: math.exp(t) - 1.0)
    term = SparseTerm((0, 1), CompositeConvexTerm(np.array([0.5, 2.0]), h, 5.0))
    s = SparseTruncatedSum(2, [term])
    x = np.array([1.0, 0.3])
    (sliced,) = s.slice_1d(1, x)
    for t in (-1.0, 0.0, 0.7):
        xt = np.array([1.0, t])
        assert sliced.fn(t) == pytest.approx(term.fn.untruncated(xt), abs=1e-12)
    assert sliced.lam == 5.0
