"""Applications of the truncated-sum solvers: regression outlier
detection (Gaussian and Poisson), best-coverage shape placement, and
piecewise-smooth signal/image restoration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .convex1d import ConvexScalarFn
from .geometry2d import Circle, ConvexPolygon, IndicatorTerm
from .quadform import INF, Quadratic, TruncatedQuadratic
from .solver1d import Solution, TruncatedConvex, minimize_sum_1d
from .solver2d import minimize_sum_2d
from .solverhd import SparseTerm, SparseTruncatedSum, minimize_ccd

# ---------------------------------------------------------------------------
# outlier detection in regression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegressionProblem:
    """Design X (n, p), response y (n,), per-case penalty lam for a
    nonzero shift; family "gaussian" (squared loss) or "poisson"
    (log-link likelihood, y integer counts >= 0)."""

    X: np.ndarray
    y: np.ndarray
    lam: float
    family: str = "gaussian"

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2-D (n, p)")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("y must be (n,) matching X rows")
        if not (self.lam > 0):
            raise ValueError("lam must be positive")
        if self.family not in ("gaussian", "poisson"):
            raise ValueError("family must be 'gaussian' or 'poisson'")
        if self.family == "poisson" and np.any(y < 0):
            raise ValueError("poisson responses must be nonnegative")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass
class OutlierFit:
    beta: np.ndarray
    gamma: np.ndarray
    flags: np.ndarray
    objective: float
    solution: Solution


def reduce_outliers_gaussian(problem: RegressionProblem):
    """Profile out the case shifts: each case becomes
    min{(y_i - x_i.beta)^2, lam} over beta."""
    terms = []
    for xi, yi in zip(problem.X, problem.y):
        A = 2.0 * np.outer(xi, xi)
        b = -2.0 * yi * xi
        terms.append(TruncatedQuadratic(Quadratic(A, b, yi * yi), problem.lam))
    return terms


def _safe_exp(t: float) -> float:
    """exp that saturates to +inf instead of raising (bracket expansion
    probes far outside the finite range)."""
    try:
        return math.exp(t)
    except OverflowError:
        return INF


def _poisson_scalar(yi) -> ConvexScalarFn:
    """h(t) = exp(t) - y t, the negative Poisson log-likelihood up to a
    beta-free constant."""
    y = float(yi)
    hint = math.log(y) if y > 0 else 0.0
    return ConvexScalarFn(
        f=lambda t: _safe_exp(t) - y * t,
        df=lambda t: _safe_exp(t) - y,
        d2f=_safe_exp,
        hint=hint,
    )


def poisson_case_levels(y, lam):
    """Truncation levels lam - y*log(y) + y (the profiled shift cost)."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ylogy = np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0)), 0.0)
    return lam - ylogy + y


def reduce_outliers_poisson(problem: RegressionProblem):
    """Profile out the shifts in the Poisson likelihood: each case
    becomes min{exp(x_i.beta) - y_i x_i.beta, lam_i*} with the level
    lam_i* = lam - y_i log y_i + y_i."""
    from .solverhd import CompositeConvexTerm

    levels = poisson_case_levels(problem.y, problem.lam)
    terms = []
    for xi, yi, li in zip(problem.X, problem.y, levels):
        h = _poisson_scalar(yi)
        if problem.p == 1:
            x0 = float(xi[0])
            y0 = float(yi)
            hint = h.hint / x0 if x0 != 0.0 else 0.0
            fn = ConvexScalarFn(
                f=lambda b, x0=x0, y0=y0: _safe_exp(x0 * b) - y0 * x0 * b,
                df=lambda b, x0=x0, y0=y0: x0 * (_safe_exp(x0 * b) - y0),
                d2f=lambda b, x0=x0: x0 * x0 * _safe_exp(x0 * b),
                hint=hint,
            )
            terms.append(TruncatedConvex(fn, float(li)))
        else:
            terms.append(CompositeConvexTerm(xi, h, float(li)))
    return terms


def detect_outliers(problem: RegressionProblem, x0=None, tol=1e-8,
                    max_iter=10000) -> OutlierFit:
    """Fit beta and per-case shifts gamma jointly.

    Exact for p <= 2 via the interval sweep (p = 1) or the boundary
    traversal (p = 2, Gaussian); otherwise cyclic coordinate descent
    from x0 (default: origin).  Cases are flagged exactly when their
    term is truncated at the optimum; flagged gammas absorb the full
    residual."""
    p = problem.p
    if problem.family == "gaussian":
        terms = reduce_outliers_gaussian(problem)
        if p == 1:
            sol = minimize_sum_1d(terms)
        elif p == 2:
            sol = minimize_sum_2d(terms)
        else:
            ssum = SparseTruncatedSum(
                p, [SparseTerm(tuple(range(p)), t) for t in terms])
            sol = minimize_ccd(ssum, x0=x0, tol=tol, max_iter=max_iter)
    else:
        terms = reduce_outliers_poisson(problem)
        if p == 1:
            sol = minimize_sum_1d(terms)
        else:
            ssum = SparseTruncatedSum(
                p, [SparseTerm(tuple(range(p)), t) for t in terms])
            sol = minimize_ccd(ssum, x0=x0, tol=tol, max_iter=max_iter)

    beta = np.atleast_1d(np.asarray(sol.x, dtype=float))
    flags = np.array([i not in sol.active for i in range(problem.n)])
    theta = problem.X @ beta
    gamma = np.zeros(problem.n)
    if problem.family == "gaussian":
        gamma[flags] = (problem.y - theta)[flags]
    else:
        for i in np.flatnonzero(flags):
            if problem.y[i] > 0:
                gamma[i] = math.log(problem.y[i]) - theta[i]
            else:
                # infimum not attained for y = 0; push the mean to
                # exp(-30), which matches the profiled cost to ~1e-13
                gamma[i] = -theta[i] - 30.0
    return OutlierFit(beta=beta, gamma=gamma, flags=flags,
                      objective=sol.value, solution=sol)


def outlier_objective(problem: RegressionProblem, beta, gamma) -> float:
    """Direct evaluation of the shifted-regression loss
    sum_i loss(y_i, x_i.beta + gamma_i) + lam * #{gamma_i != 0}."""
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    eta = problem.X @ beta + gamma
    if problem.family == "gaussian":
        loss = float(np.sum((problem.y - eta) ** 2))
    else:
        loss = float(np.sum(np.exp(eta) - problem.y * eta))
    return loss + problem.lam * int(np.count_nonzero(gamma))


# ---------------------------------------------------------------------------
# best-coverage shape placement
# ---------------------------------------------------------------------------

SHAPE_KINDS = ("circle", "square", "hexagon")


@dataclass(frozen=True)
class ShapeSpec:
    """kind: circle (size = radius), square (size = side, axis-aligned),
    or hexagon (size = circumradius, vertex on the +x axis)."""

    kind: str
    size: float

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError("kind must be one of %s" % (SHAPE_KINDS,))
        if not (self.size > 0):
            raise ValueError("size must be positive")

    @property
    def outer_radius(self) -> float:
        if self.kind == "circle":
            return self.size
        if self.kind == "square":
            return self.size * math.sqrt(0.5)
        return self.size

    def base_vertices(self) -> np.ndarray | None:
        if self.kind == "circle":
            return None
        if self.kind == "square":
            h = 0.5 * self.size
            return np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
        ang = np.arange(6) * (math.pi / 3.0)
        return self.size * np.column_stack([np.cos(ang), np.sin(ang)])

    def region_at(self, center, mirror: bool = True):
        """The set of placements ell with `center` covered: ell such that
        center is in shape(ell), i.e. center minus the mirrored shape.
        All supported shapes are centrally symmetric, so the mirror is
        the shape itself; the negation is still applied for clarity."""
        center = np.asarray(center, dtype=float)
        if self.kind == "circle":
            return Circle(center, self.size)
        v = self.base_vertices()
        if mirror:
            v = -v
        return ConvexPolygon(center + v)


@dataclass
class PlacementResult:
    location: np.ndarray
    weight: float
    covered: tuple
    solution: Solution


def placement_terms(points, shape: ShapeSpec, weights=None):
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must be (n, 2)")
    if weights is None:
        weights = np.ones(points.shape[0])
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (points.shape[0],):
        raise ValueError("weights must match points")
    return [IndicatorTerm(shape.region_at(p), float(w))
            for p, w in zip(points, weights)]


def place_shape(points, shape: ShapeSpec, weights=None) -> PlacementResult:
    """Exact maximum-weight placement: traverse all region boundaries and
    their intersections; the negative covered weight is a sum of
    truncated indicators, so the boundary-candidate argument applies."""
    sol = minimize_sum_2d(placement_terms(points, shape, weights))
    return PlacementResult(location=np.asarray(sol.x, dtype=float),
                           weight=-sol.value,
                           covered=tuple(sorted(sol.active)),
                           solution=sol)


def coverage_at(points, shape: ShapeSpec, location, weights=None) -> float:
    points = np.asarray(points, dtype=float)
    if weights is None:
        weights = np.ones(points.shape[0])
    loc = np.asarray(location, dtype=float)
    d = points - loc[None, :]
    mask = _inside_shape(shape, d)
    return float(np.sum(np.asarray(weights, dtype=float)[mask]))


_SHAPE_RTOL = 1e-9  # regions are closed; admit boundary points despite roundoff


def _inside_shape(shape: ShapeSpec, d: np.ndarray) -> np.ndarray:
    """Mask of offsets d = point - location inside the shape at origin."""
    slack = 1.0 + _SHAPE_RTOL
    if shape.kind == "circle":
        return d[:, 0] ** 2 + d[:, 1] ** 2 <= (shape.size * slack) ** 2
    if shape.kind == "square":
        h = 0.5 * shape.size * slack
        return (np.abs(d[:, 0]) <= h) & (np.abs(d[:, 1]) <= h)
    apothem = shape.size * (math.sqrt(3.0) / 2.0) * slack
    ang = math.pi / 6.0 + np.arange(6) * (math.pi / 3.0)
    normals = np.column_stack([np.cos(ang), np.sin(ang)])
    return (d @ normals.T <= apothem).all(axis=1)


def coverage_grid_scan(points, shape: ShapeSpec, weights=None,
                       resolution: int = 1500, bounds=None):
    """Brute-force reference: best covered weight over a dense grid of
    candidate locations.  bounds is ((xlo, xhi), (ylo, yhi)); when None
    the grid spans the points inflated by the shape's outer radius.
    Returns (location, weight)."""
    points = np.asarray(points, dtype=float)
    if weights is None:
        weights = np.ones(points.shape[0])
    weights = np.asarray(weights, dtype=float)
    r = shape.outer_radius
    if bounds is None:
        lo = points.min(axis=0) - r
        hi = points.max(axis=0) + r
    else:
        (bx0, bx1), (by0, by1) = bounds
        lo = np.array([float(bx0), float(by0)])
        hi = np.array([float(bx1), float(by1)])
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    acc = np.zeros((resolution, resolution))
    for p, w in zip(points, weights):
        ix0, ix1 = np.searchsorted(xs, [p[0] - r, p[0] + r])
        iy0, iy1 = np.searchsorted(ys, [p[1] - r, p[1] + r])
        ix0 = max(ix0 - 1, 0)
        iy0 = max(iy0 - 1, 0)
        gx = xs[ix0:ix1 + 1]
        gy = ys[iy0:iy1 + 1]
        dx = np.repeat(gx, gy.shape[0]) - p[0]
        dy = np.tile(gy, gx.shape[0]) - p[1]
        # location ell covers p iff ell - p lies in the mirrored shape;
        # the shapes here are centrally symmetric
        mask = _inside_shape(shape, np.column_stack([dx, dy]))
        block = acc[ix0:ix1 + 1, iy0:iy1 + 1]
        block[mask.reshape(block.shape)] += w
    k = int(np.argmax(acc))
    ix, iy = divmod(k, resolution)
    return np.array([xs[ix], ys[iy]]), float(acc[ix, iy])


# ---------------------------------------------------------------------------
# signal and image restoration
# ---------------------------------------------------------------------------


@dataclass
class RestorationResult:
    x: np.ndarray
    objective: float
    solution: Solution


def restoration_sum(y, w: float, lam: float) -> SparseTruncatedSum:
    """sum_j (x_j - y_j)^2 + w * sum_pairs min((x_i - x_j)^2, lam) as a
    sparse truncated quadratic sum (pair terms truncated at w*lam)."""
    y = np.asarray(y, dtype=float)
    if w <= 0 or lam <= 0:
        raise ValueError("w and lam must be positive")
    if y.ndim == 1:
        pairs = baselines.chain_pairs(y.shape[0])
    elif y.ndim == 2:
        pairs = baselines.grid_pairs(y.shape)
    else:
        raise ValueError("y must be 1-D or 2-D")
    yf = y.reshape(-1)
    d = yf.shape[0]
    terms = []
    for j in range(d):
        q = Quadratic(np.array([[2.0]]), np.array([-2.0 * yf[j]]), yf[j] * yf[j])
        terms.append(SparseTerm((j,), TruncatedQuadratic(q, INF)))
    a_pair = np.array([[2.0 * w, -2.0 * w], [-2.0 * w, 2.0 * w]])
    b_pair = np.zeros(2)
    for i, j in pairs:
        terms.append(SparseTerm((i, j),
                                TruncatedQuadratic(Quadratic(a_pair, b_pair, 0.0),
                                                   w * lam)))
    return SparseTruncatedSum(d, terms)


def restore_signal(y, w: float, lam: float, x0=None, tol=1e-8,
                   max_iter=10000) -> RestorationResult:
    """Coordinate-descent restoration started at the observations."""
    y = np.asarray(y, dtype=float)
    ssum = restoration_sum(y, w, lam)
    start = y.reshape(-1).copy() if x0 is None else np.asarray(x0, dtype=float).reshape(-1)
    sol = minimize_ccd(ssum, x0=start, tol=tol, max_iter=max_iter)
    return RestorationResult(x=sol.x.reshape(y.shape), objective=sol.value,
                             solution=sol)


def restore_image(y, w: float, lam: float, x0=None, tol=1e-8,
                  max_iter=10000) -> RestorationResult:
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise ValueError("image must be 2-D")
    return restore_signal(y, w, lam, x0=x0, tol=tol, max_iter=max_iter)


def restoration_objective(y, xhat, w: float, lam: float) -> float:
    """Direct evaluation of the restoration loss (reference formula)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(xhat, dtype=float)
    pairs = baselines.chain_pairs(y.shape[0]) if y.ndim == 1 else baselines.grid_pairs(y.shape)
    yf, xf = y.reshape(-1), x.reshape(-1)
    idx = np.array(pairs)
    diffs = xf[idx[:, 1]] - xf[idx[:, 0]]
    return float(np.sum((xf - yf) ** 2)
                 + w * np.sum(np.minimum(diffs ** 2, lam)))
