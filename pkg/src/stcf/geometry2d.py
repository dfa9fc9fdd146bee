"""Boundary curves of truncated 2-D terms and their intersections.

The active region of a truncated term is C_i = {x : f_i(x) <= lambda_i}.
For a positive-definite quadratic the boundary is an ellipse (or circle),
for a rank-1 quadratic a pair of parallel lines (a strip), and for the
shape-placement indicator terms a circle or convex polygon.  This module
classifies terms into those curves, intersects curve pairs, and
parameterizes each curve clockwise so a solver can walk its boundary.

Conic-conic intersections eliminate y with the quadratic resultant,
solve the resulting quartic through the companion matrix (numpy
polyroots), recover y by linear back-substitution, and polish each point
with two Newton steps on the bivariate system.  Circle pairs use the
radical-line closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .quadform import INF, PIVOT_RTOL, TruncatedQuadratic

TWO_PI = 2.0 * math.pi

DEDUPE_TOL = 1e-7        # points closer than this are one intersection
RESIDUAL_TOL = 1e-7      # |normalized conic| at accepted intersections
CONTAIN_RTOL = 1e-9      # closed-set membership slack
_IMAG_TOL = 1e-6         # quartic roots treated as real
_CIRCLE_RTOL = 1e-9      # |a-b| below this makes an ellipse a circle


class GeometryError(ValueError):
    """Geometric classification or intersection failure."""


@dataclass(frozen=True)
class Ellipse:
    """Boundary of {x : (x-center)' M (x-center) <= 1}; a >= b are the
    semi-axes and theta in [0, pi) orients the major axis."""

    center: np.ndarray
    a: float
    b: float
    theta: float


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    r: float


@dataclass(frozen=True)
class Strip:
    """Region {x : lo <= normal.x <= hi}; normal is unit length with the
    first nonzero component positive."""

    normal: np.ndarray
    lo: float
    hi: float


@dataclass(frozen=True)
class ConvexPolygon:
    """Closed convex region; vertices counter-clockwise, shape (m, 2)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 vertices of dim 2")
        m = v.shape[0]
        area2 = 0.0
        scale = float(np.abs(v).max()) + 1.0
        for i in range(m):
            p, q, r = v[i], v[(i + 1) % m], v[(i + 2) % m]
            cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
            if cross < -1e-12 * scale * scale:
                raise GeometryError("polygon vertices must be convex and counter-clockwise")
            area2 += p[0] * q[1] - q[0] * p[1]
        if area2 <= 0.0:
            raise GeometryError("polygon vertices must be counter-clockwise")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)


@dataclass(frozen=True)
class CurvePoint:
    """A point on a traversed curve: arc_key is the clockwise traversal
    parameter, other the index of the term whose boundary crosses here."""

    point: np.ndarray
    arc_key: float
    other: int = -1


@dataclass(frozen=True)
class IndicatorTerm:
    """Shape-coverage term: value -weight on the region, +inf outside,
    truncated at 0, so min{f, 0} is -weight inside and 0 outside."""

    region: object  # Circle or ConvexPolygon
    weight: float
    lam: float = 0.0

    def __post_init__(self):
        if not isinstance(self.region, (Circle, ConvexPolygon)):
            raise GeometryError("indicator region must be Circle or ConvexPolygon")
        if not (self.weight > 0.0):
            raise GeometryError("indicator weight must be positive")
        if self.lam != 0.0:
            raise GeometryError("indicator terms are truncated at 0")


# ---------------------------------------------------------------------------
# classification of truncated quadratics

def boundary_of(term: TruncatedQuadratic):
    """Level curve {f = lambda} of a truncated 2-D quadratic.

    Returns an Ellipse, Circle, or Strip, or None when there is no curve
    (lambda = +inf, empty C_i, or a constant term).  Raises GeometryError
    for terms that are unbounded below (indefinite, or rank-1 with a
    linear component across the flat direction: a parabolic level set).
    """
    if term.dim != 2:
        raise GeometryError("boundary_of needs a 2-D term, got dim %d" % term.dim)
    if term.lam == INF:
        return None
    A, b, c, lam = term.q.A, term.q.b, term.q.c, term.lam
    scale = float(np.abs(A).max())
    tol = PIVOT_RTOL * (scale + 1e-300)
    if scale <= tol:
        if float(np.abs(b).max(initial=0.0)) > CONTAIN_RTOL * (1.0 + float(np.abs(b).max(initial=0.0))):
            raise GeometryError("truncated linear term is unbounded below")
        return None  # constant term
    w, V = np.linalg.eigh(A)
    if w[0] < -tol:
        raise GeometryError("term is not convex (negative curvature %g)" % w[0])
    if w[0] > tol:
        center = np.linalg.solve(A, -b)
        vmin = c + 0.5 * float(b @ center)
        if vmin >= lam:
            return None  # empty or single-point region
        semi = np.sqrt(2.0 * (lam - vmin) / w)  # w ascending: semi[0] is major
        a_ax, b_ax = float(semi[0]), float(semi[1])
        if abs(a_ax - b_ax) <= _CIRCLE_RTOL * a_ax:
            center.setflags(write=False)
            return Circle(center, 0.5 * (a_ax + b_ax))
        theta = math.atan2(float(V[1, 0]), float(V[0, 0])) % math.pi
        center.setflags(write=False)
        return Ellipse(center, a_ax, b_ax, theta)
    # rank 1: curvature only along u = V[:, 1]
    u = V[:, 1].copy()
    sigma = float(w[1])
    beta = float(b @ u)
    perp = b - beta * u
    if float(np.abs(perp).max()) > CONTAIN_RTOL * (1.0 + float(np.abs(b).max())):
        raise GeometryError("rank-1 term with a cross linear part is unbounded below "
                            "(parabolic level set)")
    disc = beta * beta - 2.0 * sigma * (c - lam)
    if disc < 0.0:
        return None
    rt = math.sqrt(disc)
    lo = (-beta - rt) / sigma
    hi = (-beta + rt) / sigma
    if u[0] < 0.0 or (u[0] == 0.0 and u[1] < 0.0):
        u = -u
        lo, hi = -hi, -lo
    u.setflags(write=False)
    return Strip(u, lo, hi)


def contains(term, point, rtol: float = CONTAIN_RTOL) -> bool:
    """Closed-set membership point in C_i for a truncated quadratic or an
    indicator term."""
    p = np.asarray(point, dtype=float)
    if isinstance(term, TruncatedQuadratic):
        lam = term.lam
        if lam == INF:
            return True
        return term.q(p) <= lam + rtol * (1.0 + abs(lam))
    if isinstance(term, IndicatorTerm):
        return region_contains(term.region, p, rtol)
    raise GeometryError("unsupported term type %s" % type(term).__name__)


def region_contains(region, point, rtol: float = CONTAIN_RTOL) -> bool:
    p = np.asarray(point, dtype=float)
    if isinstance(region, Circle):
        r = region.r
        return math.hypot(p[0] - region.center[0], p[1] - region.center[1]) <= r + rtol * (1.0 + r)
    if isinstance(region, Ellipse):
        w = _rot(-region.theta) @ (p - region.center)
        val = (w[0] / region.a) ** 2 + (w[1] / region.b) ** 2
        return val <= 1.0 + 2.0 * rtol
    if isinstance(region, Strip):
        s = float(region.normal @ p)
        slack = rtol * (1.0 + abs(region.lo) + abs(region.hi))
        return region.lo - slack <= s <= region.hi + slack
    if isinstance(region, ConvexPolygon):
        v = region.vertices
        m = v.shape[0]
        scale = float(np.abs(v).max()) + 1.0
        for i in range(m):
            e = v[(i + 1) % m] - v[i]
            cross = e[0] * (p[1] - v[i][1]) - e[1] * (p[0] - v[i][0])
            if cross < -rtol * scale * (1.0 + scale):
                return False
        return True
    raise GeometryError("unsupported region type %s" % type(region).__name__)


# ---------------------------------------------------------------------------
# traversal components

def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


class ConicComponent:
    """Closed curve walked clockwise: p(t) = center + R(theta) (a cos t, -b sin t)."""

    kind = "conic"
    period = TWO_PI

    def __init__(self, center, a, b, theta, circle=False):
        self.center = np.asarray(center, dtype=float)
        self.a = float(a)
        self.b = float(b)
        self.theta = float(theta)
        self.circle = bool(circle)
        self.R = _rot(self.theta)
        self.coeffs = _conic_coeffs(self.center, self.a, self.b, self.theta)
        self.signature = ("conic",) + tuple(round(v, 9) for v in self.coeffs)

    def key_of(self, p) -> float:
        w = self.R.T @ (np.asarray(p, dtype=float) - self.center)
        return math.atan2(-w[1] / self.b, w[0] / self.a) % TWO_PI

    def point_at(self, key: float) -> np.ndarray:
        key = key % TWO_PI
        local = np.array([self.a * math.cos(key), -self.b * math.sin(key)])
        return self.center + self.R @ local


class LineComponent:
    """One line of a strip boundary, walked along direction d (unit)."""

    kind = "line"
    period = None

    def __init__(self, p0, d):
        self.p0 = np.asarray(p0, dtype=float)
        self.d = np.asarray(d, dtype=float)
        n = np.array([-self.d[1], self.d[0]])
        if n[0] < 0.0 or (n[0] == 0.0 and n[1] < 0.0):
            n = -n
        self.signature = ("line", round(float(n[0]), 9), round(float(n[1]), 9),
                          round(float(n @ self.p0), 9))

    def key_of(self, p) -> float:
        return float((np.asarray(p, dtype=float) - self.p0) @ self.d)

    def point_at(self, key: float) -> np.ndarray:
        return self.p0 + key * self.d


class PolygonComponent:
    """Polygon boundary walked clockwise; the key is perimeter distance."""

    kind = "polygon"

    def __init__(self, polygon: ConvexPolygon):
        verts_cw = polygon.vertices[::-1].copy()
        self.verts = verts_cw
        m = verts_cw.shape[0]
        self.edges = [(verts_cw[i], verts_cw[(i + 1) % m]) for i in range(m)]
        lengths = [float(np.hypot(*(q - p))) for p, q in self.edges]
        self.cum = np.concatenate([[0.0], np.cumsum(lengths)])
        self.period = float(self.cum[-1])
        self.signature = ("polygon",) + tuple(
            round(float(v), 9) for v in polygon.vertices.ravel())

    def key_of(self, p) -> float:
        p = np.asarray(p, dtype=float)
        best_d2 = INF
        best_key = 0.0
        for i, (q0, q1) in enumerate(self.edges):
            e = q1 - q0
            L2 = float(e @ e)
            t = float((p - q0) @ e) / L2 if L2 > 0 else 0.0
            t = min(max(t, 0.0), 1.0)
            proj = q0 + t * e
            d2 = float((p - proj) @ (p - proj))
            if d2 < best_d2:
                best_d2 = d2
                best_key = float(self.cum[i]) + t * math.sqrt(L2)
        return best_key % self.period

    def point_at(self, key: float) -> np.ndarray:
        key = key % self.period
        i = int(np.searchsorted(self.cum, key, side="right")) - 1
        i = min(max(i, 0), len(self.edges) - 1)
        q0, q1 = self.edges[i]
        L = float(self.cum[i + 1] - self.cum[i])
        t = (key - float(self.cum[i])) / L if L > 0 else 0.0
        return q0 + t * (q1 - q0)


def _conic_coeffs(center, a, b, theta):
    """Implicit (A, B, C, D, E, F) with max-abs 1 for
    (p-c)' R diag(1/a^2, 1/b^2) R' (p-c) - 1 = 0."""
    R = _rot(theta)
    M = R @ np.diag([1.0 / (a * a), 1.0 / (b * b)]) @ R.T
    cx, cy = float(center[0]), float(center[1])
    A = M[0, 0]
    B = 2.0 * M[0, 1]
    C = M[1, 1]
    D = -2.0 * (M[0, 0] * cx + M[0, 1] * cy)
    E = -2.0 * (M[0, 1] * cx + M[1, 1] * cy)
    F = cx * (M[0, 0] * cx + M[0, 1] * cy) + cy * (M[0, 1] * cx + M[1, 1] * cy) - 1.0
    coeffs = np.array([A, B, C, D, E, F])
    return tuple(coeffs / np.abs(coeffs).max())


def components_of(curve) -> list:
    """Traversal components of a boundary curve (two for a strip)."""
    if isinstance(curve, Ellipse):
        return [ConicComponent(curve.center, curve.a, curve.b, curve.theta)]
    if isinstance(curve, Circle):
        return [ConicComponent(curve.center, curve.r, curve.r, 0.0, circle=True)]
    if isinstance(curve, Strip):
        n = curve.normal
        d = np.array([-n[1], n[0]])
        return [LineComponent(n * curve.lo, d), LineComponent(n * curve.hi, d)]
    if isinstance(curve, ConvexPolygon):
        return [PolygonComponent(curve)]
    raise GeometryError("unsupported curve type %s" % type(curve).__name__)


def sort_along(curve, points):
    """Group points by boundary component and sort clockwise.

    Returns a list (one entry per component) of lists of CurvePoint with
    ascending arc_key."""
    comps = components_of(curve)
    grouped = [[] for _ in comps]
    for p in points:
        p = np.asarray(p, dtype=float)
        if len(comps) == 1:
            ci = 0
        else:
            # strips: pick the line the point lies on
            dists = [abs(float((p - comp.p0) @ np.array([-comp.d[1], comp.d[0]])))
                     for comp in comps]
            ci = int(np.argmin(dists))
        grouped[ci].append(CurvePoint(p, comps[ci].key_of(p)))
    return [sorted(g, key=lambda cp: cp.arc_key) for g in grouped]


# ---------------------------------------------------------------------------
# intersections

def _conic_eval(co, x, y):
    A, B, C, D, E, F = co
    return A * x * x + B * x * y + C * y * y + D * x + E * y + F


def _conic_grad(co, x, y):
    A, B, C, D, E, F = co
    return (2.0 * A * x + B * y + D, B * x + 2.0 * C * y + E)


def _polish(pt, co1, co2, steps=2):
    x, y = float(pt[0]), float(pt[1])
    for _ in range(steps):
        f1 = _conic_eval(co1, x, y)
        f2 = _conic_eval(co2, x, y)
        g1x, g1y = _conic_grad(co1, x, y)
        g2x, g2y = _conic_grad(co2, x, y)
        det = g1x * g2y - g1y * g2x
        if abs(det) < 1e-14:
            break
        x -= (f1 * g2y - f2 * g1y) / det
        y -= (f2 * g1x - f1 * g2x) / det
    return np.array([x, y])


def _conic_conic(co1, co2):
    # y-degree coefficient polynomials in x, ascending
    A1, B1, C1, D1, E1, F1 = co1
    A2, B2, C2, D2, E2, F2 = co2
    f0 = np.array([F1, D1, A1])
    f1 = np.array([E1, B1])
    f2 = np.array([C1])
    g0 = np.array([F2, D2, A2])
    g1 = np.array([E2, B2])
    g2 = np.array([C2])
    s0 = npoly.polysub(npoly.polymul(f2, g0), npoly.polymul(g2, f0))
    s1 = npoly.polysub(npoly.polymul(f2, g1), npoly.polymul(g2, f1))
    s2 = npoly.polysub(npoly.polymul(f1, g0), npoly.polymul(g1, f0))
    res = npoly.polysub(npoly.polymul(s0, s0), npoly.polymul(s1, s2))
    top = float(np.abs(res).max())
    if top <= 1e-14:
        return []  # coincident or fully degenerate pair
    res = res / top
    keep = np.nonzero(np.abs(res) > 1e-13)[0]
    res = res[: keep.max() + 1] if keep.size else res[:1]
    if res.size < 2:
        return []
    roots = npoly.polyroots(res)
    out = []
    for rt in roots:
        if abs(rt.imag) > _IMAG_TOL * (1.0 + abs(rt.real)):
            continue
        x = float(rt.real)
        den = npoly.polyval(x, s1)
        if abs(den) > 1e-10:
            y = -npoly.polyval(x, s0) / den
            out.append((x, float(y)))
        else:
            # vertical alignment: both y roots of conic 1 at this x
            a = C1
            b = B1 * x + E1
            c = A1 * x * x + D1 * x + F1
            if abs(a) < 1e-14:
                if abs(b) > 1e-14:
                    out.append((x, -c / b))
                continue
            disc = b * b - 4.0 * a * c
            if disc < -1e-9:
                continue
            rtd = math.sqrt(max(disc, 0.0))
            for y in ((-b - rtd) / (2.0 * a), (-b + rtd) / (2.0 * a)):
                if abs(_conic_eval(co2, x, y)) < 1e-5:
                    out.append((x, y))
    pts = []
    for x, y in out:
        p = _polish(np.array([x, y]), co1, co2)
        if (abs(_conic_eval(co1, p[0], p[1])) <= RESIDUAL_TOL
                and abs(_conic_eval(co2, p[0], p[1])) <= RESIDUAL_TOL):
            pts.append(p)
    return pts


def _circle_circle(c1, r1, c2, r2):
    dx = c2[0] - c1[0]
    dy = c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d <= 1e-14:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 < -DEDUPE_TOL * DEDUPE_TOL:
        return []
    h = math.sqrt(max(h2, 0.0))
    ux, uy = dx / d, dy / d
    mx, my = c1[0] + a * ux, c1[1] + a * uy
    if h == 0.0:
        return [np.array([mx, my])]
    return [np.array([mx - h * uy, my + h * ux]),
            np.array([mx + h * uy, my - h * ux])]


def _conic_line(co, p0, d):
    A, B, C, D, E, F = co
    x0, y0 = float(p0[0]), float(p0[1])
    dx, dy = float(d[0]), float(d[1])
    qa = A * dx * dx + B * dx * dy + C * dy * dy
    qb = 2.0 * A * x0 * dx + B * (x0 * dy + y0 * dx) + 2.0 * C * y0 * dy + D * dx + E * dy
    qc = _conic_eval(co, x0, y0)
    ts = _solve_quadratic(qa, qb, qc)
    return [np.asarray(p0) + t * np.asarray(d) for t in ts]


def _solve_quadratic(a, b, c):
    if abs(a) <= 1e-15 * (abs(b) + abs(c) + 1.0):
        if abs(b) <= 1e-15 * (abs(c) + 1.0):
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    rt = math.sqrt(disc)
    # numerically stable pair
    q = -0.5 * (b + math.copysign(rt, b)) if b != 0.0 else 0.5 * rt
    if q == 0.0:
        return [0.0] if c == 0.0 else [-b / (2.0 * a)]
    t1 = q / a
    t2 = c / q
    return [t1] if t1 == t2 else [t1, t2]


def _line_line(p0, d0, p1, d1):
    det = d0[0] * (-d1[1]) - d0[1] * (-d1[0])
    scale = abs(d0[0]) + abs(d0[1]) + abs(d1[0]) + abs(d1[1])
    if abs(det) <= 1e-14 * scale * scale:
        return []
    rx = p1[0] - p0[0]
    ry = p1[1] - p0[1]
    t = (rx * (-d1[1]) - ry * (-d1[0])) / det
    return [np.asarray(p0) + t * np.asarray(d0)]


def _segment_params(q0, q1):
    e = np.asarray(q1, dtype=float) - np.asarray(q0, dtype=float)
    return np.asarray(q0, dtype=float), e, float(np.hypot(e[0], e[1]))


def _filter_on_segment(pts, q0, q1):
    q0, e, L = _segment_params(q0, q1)
    if L == 0.0:
        return []
    tol = 1e-9 * (1.0 + L)
    out = []
    for p in pts:
        t = float((np.asarray(p) - q0) @ e) / (L * L)
        if -tol / L <= t <= 1.0 + tol / L:
            out.append(np.asarray(p, dtype=float))
    return out


def _intersect_components(x, y):
    kx, ky = x.kind, y.kind
    if kx == "conic" and ky == "conic":
        if x.circle and y.circle:
            return _circle_circle(x.center, x.a, y.center, y.a)
        return _conic_conic(x.coeffs, y.coeffs)
    if kx == "conic" and ky == "line":
        return _conic_line(x.coeffs, y.p0, y.d)
    if kx == "line" and ky == "conic":
        return _conic_line(y.coeffs, x.p0, x.d)
    if kx == "line" and ky == "line":
        return _line_line(x.p0, x.d, y.p0, y.d)
    if kx == "conic" and ky == "polygon":
        pts = []
        for q0, q1 in y.edges:
            d = (q1 - q0)
            L = float(np.hypot(d[0], d[1]))
            if L == 0.0:
                continue
            cand = _conic_line(x.coeffs, q0, d / L)
            pts.extend(_filter_on_segment(cand, q0, q1))
        return pts
    if kx == "polygon" and ky == "conic":
        return _intersect_components(y, x)
    if kx == "line" and ky == "polygon":
        pts = []
        for q0, q1 in y.edges:
            d = q1 - q0
            L = float(np.hypot(d[0], d[1]))
            if L == 0.0:
                continue
            cand = _line_line(x.p0, x.d, q0, d / L)
            pts.extend(_filter_on_segment(cand, q0, q1))
        return pts
    if kx == "polygon" and ky == "line":
        return _intersect_components(y, x)
    if kx == "polygon" and ky == "polygon":
        pts = []
        for q0, q1 in x.edges:
            dx = q1 - q0
            Lx = float(np.hypot(dx[0], dx[1]))
            if Lx == 0.0:
                continue
            ux = dx / Lx
            for r0, r1 in y.edges:
                dy_ = r1 - r0
                Ly = float(np.hypot(dy_[0], dy_[1]))
                if Ly == 0.0:
                    continue
                cand = _line_line(q0, ux, r0, dy_ / Ly)
                cand = _filter_on_segment(cand, q0, q1)
                cand = _filter_on_segment(cand, r0, r1)
                pts.extend(cand)
        return pts
    raise GeometryError("cannot intersect %s with %s" % (kx, ky))


def _dedupe(points, tol=DEDUPE_TOL):
    out = []
    for p in points:
        p = np.asarray(p, dtype=float)
        if not all(math.hypot(p[0] - q[0], p[1] - q[1]) > tol for q in out):
            continue
        out.append(p)
    return out


def intersect_components(x, y):
    """Deduplicated intersection points of two traversal components.

    Coincident components (identical signatures) return no points."""
    if x.signature == y.signature:
        return []
    return _dedupe(_intersect_components(x, y))


def intersect(curve1, curve2) -> np.ndarray:
    """All intersection points of two boundary curves, deduplicated within
    DEDUPE_TOL and sorted lexicographically; shape (k, 2)."""
    pts = []
    for cx in components_of(curve1):
        for cy in components_of(curve2):
            pts.extend(intersect_components(cx, cy))
    pts = _dedupe(pts)
    if not pts:
        return np.zeros((0, 2))
    arr = np.array(pts)
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return arr[order]
