"""Brute-force reference minimizers.

subset_oracle enumerates every subset of truncatable terms in Gray-code
order (one add/remove per step) and minimizes each unconstrained
active-set sum in closed form.  Any subset sum bounds the objective from
below everywhere and the subset realized at the true minimizer attains
it, so the minimum over all 2^m subsets equals the global minimum.  The
closed forms here are written independently of the sweep solvers on
purpose: this module is the referee.

grid_oracle scans a uniform grid, a crude but assumption-free bound.
"""

from __future__ import annotations

import math

import numpy as np

from .convex1d import minimize_convex_sum
from .geometry2d import IndicatorTerm, region_contains
from .quadform import INF, TruncatedQuadratic
from .solver1d import Solution, TruncatedConvex, _normalized_fn

_MAX_SUBSET_TERMS = 20


def objective_value(terms, x) -> float:
    """sum_i min{f_i(x), lambda_i} for mixed term types."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    total = 0.0
    for t in terms:
        if isinstance(t, TruncatedQuadratic):
            total += min(t.q(x), t.lam)
        elif isinstance(t, TruncatedConvex):
            total += min(t.fn(float(x[0])), t.lam)
        elif isinstance(t, IndicatorTerm):
            total += -t.weight if region_contains(t.region, x) else 0.0
        else:
            raise ValueError("unsupported term type %s" % type(t).__name__)
    return total


def _min_1d(a, b, c, tol):
    if a > tol:
        x = -b / a
        return x * (0.5 * a * x + b) + c, (x,)
    if abs(b) <= tol:
        return c, (0.0,)
    return None


def _min_2d(a11, a12, a22, b1, b2, c, tol):
    def val(x0, x1):
        # Value at the candidate point; evaluating beats the c + 0.5*b'x
        # shortcut, whose error grows linearly with the solve error.
        return (0.5 * (a11 * x0 * x0 + a22 * x1 * x1) + a12 * x0 * x1
                + b1 * x0 + b2 * x1 + c)

    amax = max(abs(a11), abs(a12), abs(a22))
    if amax <= tol:
        if max(abs(b1), abs(b2)) <= tol:
            return c, (0.0, 0.0)
        return None
    det = a11 * a22 - a12 * a12
    if det > tol * max(a11, a22):
        x0 = (-b1 * a22 + b2 * a12) / det
        x1 = (-b2 * a11 + b1 * a12) / det
        return val(x0, x1), (x0, x1)
    if a11 >= a22:
        u0, u1 = a11, a12
    else:
        u0, u1 = a12, a22
    nrm = math.hypot(u0, u1)
    if nrm <= tol:
        return (c, (0.0, 0.0)) if max(abs(b1), abs(b2)) <= tol else None
    u0 /= nrm
    u1 /= nrm
    sigma = a11 + a22
    beta = b1 * u0 + b2 * u1
    if max(abs(b1 - beta * u0), abs(b2 - beta * u1)) > 1e-9 * (1.0 + abs(b1) + abs(b2)):
        return None
    t = -beta / sigma
    return val(t * u0, t * u1), (t * u0, t * u1)


def subset_oracle(terms) -> Solution:
    """Exact minimum by enumerating all active subsets (dim 1 or 2).

    Terms with lambda = +inf join every subset.  Limited to
    _MAX_SUBSET_TERMS truncatable terms.  1-D terms may be generic
    convex; 2-D terms must be quadratic.
    """
    terms = list(terms)
    if not terms:
        return Solution(np.zeros(1), 0.0, frozenset(), 1, 0)
    if any(isinstance(t, IndicatorTerm) for t in terms):
        raise ValueError("subset_oracle does not handle indicator terms; use a grid scan")
    dim = 1 if isinstance(terms[0], TruncatedConvex) else terms[0].dim
    for i, t in enumerate(terms):
        d = 1 if isinstance(t, TruncatedConvex) else t.dim
        if d != dim:
            raise ValueError("term %d has dim %d, expected %d" % (i, d, dim))
    if dim not in (1, 2):
        raise ValueError("subset_oracle supports dim 1 or 2")

    fin = [i for i, t in enumerate(terms) if t.lam != INF]
    base_idx = [i for i, t in enumerate(terms) if t.lam == INF]
    if len(fin) > _MAX_SUBSET_TERMS:
        raise ValueError("too many truncatable terms (%d > %d)"
                         % (len(fin), _MAX_SUBSET_TERMS))
    sum_lam = sum(terms[i].lam for i in fin)

    # coefficient table: quadratic terms normalized by -lambda; generic
    # convex terms kept as callables
    quad_co = {}
    gen_fn = {}
    scale = 1.0
    base_quad = [0.0] * (3 if dim == 1 else 6)
    base_fns = []
    for i, t in enumerate(terms):
        if isinstance(t, TruncatedConvex):
            if t.lam == INF:
                base_fns.append(t.fn)
            else:
                gen_fn[i] = _normalized_fn(t)
            continue
        if dim == 1:
            co = [float(t.q.A[0, 0]), float(t.q.b[0]), t.q.c]
            scale += abs(co[0]) + abs(co[1])
        else:
            co = [float(t.q.A[0, 0]), float(t.q.A[0, 1]), float(t.q.A[1, 1]),
                  float(t.q.b[0]), float(t.q.b[1]), t.q.c]
            scale += abs(co[0]) + abs(co[1]) + abs(co[2])
        if t.lam == INF:
            for j in range(len(co)):
                base_quad[j] += co[j]
        else:
            co[-1] -= t.lam
            quad_co[i] = co
    tol = 1e-12 * scale

    acc = list(base_quad)
    active_fns = {}
    state = [False] * len(fin)

    def evaluate():
        if gen_fn or base_fns:
            if dim != 1:
                raise ValueError("generic convex terms are 1-D only")
            quad = (acc[0], acc[1], acc[2]) if acc[0] > tol else \
                (0.0, acc[1] if abs(acc[1]) > tol else 0.0, acc[2])
            sm = minimize_convex_sum(list(base_fns) + list(active_fns.values()), quad=quad)
            return sm.value, (sm.x,)
        if dim == 1:
            return _min_1d(acc[0], acc[1], acc[2], tol) or (INF, (0.0,))
        got = _min_2d(acc[0], acc[1], acc[2], acc[3], acc[4], acc[5], tol)
        return got if got is not None else (INF, (0.0, 0.0))

    best_v, best_x = evaluate()
    best_gray = 0
    m = len(fin)
    for g in range(1, 1 << m):
        j = (g & -g).bit_length() - 1  # flipped bit in the Gray sequence
        i = fin[j]
        turning_on = not state[j]
        state[j] = turning_on
        if i in gen_fn:
            if turning_on:
                active_fns[i] = gen_fn[i]
            else:
                del active_fns[i]
        else:
            co = quad_co[i]
            s = 1.0 if turning_on else -1.0
            for q in range(len(co)):
                acc[q] += s * co[q]
        v, x = evaluate()
        if v < best_v:
            best_v = v
            best_x = x
            best_gray = g

    chosen = set(base_idx)
    code = best_gray ^ (best_gray >> 1)
    for j in range(m):
        if code >> j & 1:
            chosen.add(fin[j])
    return Solution(
        x=np.array(best_x),
        value=best_v + sum_lam,
        active=frozenset(chosen),
        pieces_visited=1 << m,
        iterations=0,
    )


def grid_oracle(terms, lo, hi, resolution: int):
    """Best objective value over a uniform grid on the box [lo, hi].

    lo/hi are scalars (1-D) or length-2 sequences.  Returns (x, value)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or lo.shape[0] not in (1, 2):
        raise ValueError("lo/hi must both have length 1 or 2")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if lo.shape[0] == 1:
        xs = np.linspace(lo[0], hi[0], resolution)
        vals = np.array([objective_value(terms, (x,)) for x in xs])
        k = int(np.argmin(vals))
        return np.array([xs[k]]), float(vals[k])
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    best_v = INF
    best_xy = (lo[0], lo[1])
    for x in xs:
        for y in ys:
            v = objective_value(terms, (x, y))
            if v < best_v:
                best_v = v
                best_xy = (x, y)
    return np.array(best_xy), float(best_v)
