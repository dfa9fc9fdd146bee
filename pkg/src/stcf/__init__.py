"""Exact and scalable minimization of sums of truncated convex functions.

Minimize sum_i min{f_i(x), lambda_i} for convex f_i: exactly in one or
two dimensions by sweeping the truncation boundaries, by exhaustive
subset oracle for verification, and by monotone cyclic coordinate
descent for high-dimensional sparse sums.  Applications: regression
outlier detection, best-coverage shape placement, and piecewise-smooth
signal/image restoration."""

from .convex1d import (ConvexDivergenceError, ConvexScalarFn, ScalarMin,
                       minimize_convex_sum, quadratic_fn)
from .geometry2d import (Circle, ConvexPolygon, Ellipse, GeometryError,
                         IndicatorTerm, Strip, boundary_of, contains,
                         intersect, region_contains)
from .oracle import grid_oracle, objective_value, subset_oracle
from .quadform import INF, ActiveSum, QuadMin, Quadratic, TruncatedQuadratic, minimize
from .solver1d import Solution, TruncatedConvex, minimize_sum_1d, sweep_events
from .solver2d import enumerate_candidate_sets, minimize_sum_2d
from .solverhd import (CompositeConvexTerm, SparseTerm, SparseTruncatedSum,
                       minimize_ccd)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ActiveSum",
    "Circle",
    "CompositeConvexTerm",
    "ConvexDivergenceError",
    "ConvexPolygon",
    "ConvexScalarFn",
    "Ellipse",
    "GeometryError",
    "IndicatorTerm",
    "QuadMin",
    "Quadratic",
    "ScalarMin",
    "Solution",
    "SparseTerm",
    "SparseTruncatedSum",
    "Strip",
    "TruncatedConvex",
    "TruncatedQuadratic",
    "boundary_of",
    "contains",
    "enumerate_candidate_sets",
    "grid_oracle",
    "intersect",
    "minimize",
    "minimize_ccd",
    "minimize_convex_sum",
    "minimize_sum_1d",
    "minimize_sum_2d",
    "objective_value",
    "quadratic_fn",
    "region_contains",
    "subset_oracle",
    "sweep_events",
    "__version__",
]
