"""Exact minimization of a sum of truncated convex functions on the line.

Each term min{f_i(x), lambda_i} is active on the closed interval
C_i = {x : f_i(x) <= lambda_i}.  Working with the normalized functions
g_i = f_i - lambda_i, the objective is sum_i min{g_i, 0} plus the constant
sum of finite lambdas, and between consecutive interval endpoints the set
of active terms is constant.  The sweep walks the sorted endpoints,
maintains the coefficient sum of the active terms, and takes the best
unconstrained piece minimum; ignoring the piece bounds is safe because any
active-set sum bounds the objective from below everywhere and every
realized active set is visited.

Never-truncated terms (lambda = +inf) stay in every active sum.  Terms
whose C_i is a half-line (monotone convex f_i, e.g. exp terms) enter the
sweep already active and never leave, or vice versa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex1d import ConvexScalarFn, crossing_interval, minimize_convex_sum
from .quadform import INF, PIVOT_RTOL, TruncatedQuadratic

ENTER = "enter"
LEAVE = "leave"


@dataclass(frozen=True)
class TruncatedConvex:
    """min{fn(x), lam} for a generic convex scalar fn."""

    fn: ConvexScalarFn
    lam: float

    def __call__(self, x: float) -> float:
        return min(self.fn(x), self.lam)


@dataclass(frozen=True)
class SweepEvent:
    position: float
    kind: str  # "enter" or "leave"
    index: int


@dataclass(frozen=True)
class Solution:
    """x: minimizer (shape (d,)); value: objective at x; active: indices
    of the terms summed in the winning candidate (never-truncated terms
    included); pieces_visited: candidate minimizations performed;
    iterations: coordinate-descent cycles (0 for the direct sweeps)."""

    x: np.ndarray
    value: float
    active: frozenset
    pieces_visited: int
    iterations: int
    info: dict = field(default_factory=dict, compare=False, repr=False)


def _classify(term, i: int):
    """Return (kind, payload): kind "base" (lam=+inf, payload None),
    "always" (C_i = R, payload normalized constant), "empty" (payload
    None), or "interval" (payload (l, r), ends possibly +-inf)."""
    lam = term.lam
    if lam == INF:
        return ("base", None)
    if isinstance(term, TruncatedQuadratic):
        a = float(term.q.A[0, 0])
        b = float(term.q.b[0])
        c = term.q.c
        if a > 0.0:
            disc = b * b - 2.0 * a * (c - lam)
            if disc < 0.0:
                return ("empty", None)
            rt = math.sqrt(disc)
            return ("interval", ((-b - rt) / a, (-b + rt) / a))
        if a < 0.0:
            raise ValueError("term %d is concave (A[0,0] = %g)" % (i, a))
        if b == 0.0:
            return ("always", c - lam) if c <= lam else ("empty", None)
        raise ValueError("term %d is a truncated non-constant linear function, "
                         "which is unbounded below" % i)
    iv = crossing_interval(term.fn, lam)
    if iv is None:
        return ("empty", None)
    if iv[0] == -INF and iv[1] == INF:
        return ("always", None)
    return ("interval", iv)


def sweep_events(terms) -> list:
    """Sorted finite interval endpoints; ties order leave-before-enter,
    then by term index.  Half-line terms contribute one event."""
    evs = []
    for i, term in enumerate(terms):
        kind, payload = _classify(term, i)
        if kind != "interval":
            continue
        l, r = payload
        if l != -INF:
            evs.append(SweepEvent(l, ENTER, i))
        if r != INF:
            evs.append(SweepEvent(r, LEAVE, i))
    evs.sort(key=lambda e: (e.position, 0 if e.kind == LEAVE else 1, e.index))
    return evs


def _norm_quad_coeffs(term: TruncatedQuadratic):
    q = term.q
    return (float(q.A[0, 0]), float(q.b[0]), q.c - term.lam)


def minimize_sum_1d(terms) -> Solution:
    """Global minimum of sum_i min{f_i(x), lambda_i} over the line.

    terms: sequence of TruncatedQuadratic (dim 1) and/or TruncatedConvex.
    """
    terms = list(terms)
    for i, t in enumerate(terms):
        if isinstance(t, TruncatedQuadratic):
            if t.dim != 1:
                raise ValueError("term %d has dim %d, expected 1" % (i, t.dim))
        elif not isinstance(t, TruncatedConvex):
            raise ValueError("term %d: unsupported type %s" % (i, type(t).__name__))

    sum_lam = 0.0
    base_idx = []
    always_idx = []
    base_quad = [0.0, 0.0, 0.0]   # accumulated untruncated/always-active quadratic part
    base_fns = []                  # generic never-inactive functions
    events = []                    # (pos, rank, index, entering)
    init_active = []               # indices active before the leftmost event
    payload = {}                   # index -> normalized quad coeffs or fn
    generic = False

    for i, term in enumerate(terms):
        kind, data = _classify(term, i)
        quad = isinstance(term, TruncatedQuadratic)
        if term.lam != INF:
            sum_lam += term.lam
        if kind == "empty":
            continue
        if kind == "base":
            base_idx.append(i)
            if quad:
                a, b, c = float(term.q.A[0, 0]), float(term.q.b[0]), term.q.c
                base_quad[0] += a
                base_quad[1] += b
                base_quad[2] += c
            else:
                generic = True
                base_fns.append(term.fn)
            continue
        if kind == "always":
            always_idx.append(i)
            if quad:
                base_quad[2] += data
            else:
                generic = True
                base_fns.append(_normalized_fn(term))
            continue
        l, r = data
        if quad:
            payload[i] = _norm_quad_coeffs(term)
        else:
            generic = True
            payload[i] = _normalized_fn(term)
        if l == -INF:
            init_active.append(i)
        else:
            events.append((l, 1, i))
        if r != INF:
            events.append((r, 0, i))
    events.sort()

    if generic:
        best_v, best_x, best_gi, pieces = _sweep_generic(
            base_quad, base_fns, payload, init_active, events)
    else:
        best_v, best_x, best_gi, pieces = _sweep_quadratic(
            base_quad, payload, init_active, events)

    active = set(base_idx) | set(always_idx) | set(init_active)
    gi = -1
    k = 0
    while k < len(events) and gi < best_gi:
        pos = events[k][0]
        while k < len(events) and events[k][0] == pos:
            _, rank, idx = events[k]
            if rank == 1:
                active.add(idx)
            else:
                active.discard(idx)
            k += 1
        gi += 1

    return Solution(
        x=np.array([best_x]),
        value=best_v + sum_lam,
        active=frozenset(active),
        pieces_visited=pieces,
        iterations=0,
    )


def _normalized_fn(term: TruncatedConvex) -> ConvexScalarFn:
    lam = term.lam
    fn = term.fn
    return ConvexScalarFn(
        f=lambda x: fn.f(x) - lam,
        df=fn.df,
        d2f=fn.d2f,
        hint=fn.hint,
    )


def _sweep_quadratic(base_quad, payload, init_active, events):
    A, B, C = base_quad
    for i in init_active:
        a, b, c = payload[i]
        A += a
        B += b
        C += c
    scale = abs(base_quad[0]) + abs(base_quad[1]) + 1.0
    for a, b, _ in payload.values():
        scale += abs(a) + abs(b)
    tol = PIVOT_RTOL * scale

    best_v = INF
    best_x = 0.0
    best_gi = -1
    pieces = 0

    def consider(x_here, gi):
        nonlocal best_v, best_x, best_gi, pieces
        pieces += 1
        if A > tol:
            x = -B / A
            v = C - 0.5 * B * B / A
        elif abs(B) <= tol:
            x = x_here
            v = C
        else:
            raise ValueError("active sum is linear and unbounded below")
        if v < best_v:
            best_v = v
            best_x = x
            best_gi = gi

    consider(0.0, -1)
    k = 0
    gi = 0
    n_ev = len(events)
    while k < n_ev:
        pos = events[k][0]
        while k < n_ev and events[k][0] == pos:
            _, rank, idx = events[k]
            a, b, c = payload[idx]
            if rank == 1:
                A += a
                B += b
                C += c
            else:
                A -= a
                B -= b
                C -= c
            k += 1
        consider(pos, gi)
        gi += 1
    return best_v, best_x, best_gi, pieces


def _sweep_generic(base_quad, base_fns, payload, init_active, events):
    A, B, C = base_quad
    active_fns = dict()
    for i in init_active:
        item = payload[i]
        if isinstance(item, tuple):
            A += item[0]
            B += item[1]
            C += item[2]
        else:
            active_fns[i] = item
    scale = abs(base_quad[0]) + abs(base_quad[1]) + 1.0
    for item in payload.values():
        if isinstance(item, tuple):
            scale += abs(item[0]) + abs(item[1])
    tol = PIVOT_RTOL * scale

    best_v = INF
    best_x = 0.0
    best_gi = -1
    pieces = 0

    def consider(gi):
        nonlocal best_v, best_x, best_gi, pieces
        pieces += 1
        # snap cancellation residue so flat pieces stay flat
        if abs(A) > tol:
            quad = (A, B, C)
        else:
            quad = (0.0, B if abs(B) > tol else 0.0, C)
        sm = minimize_convex_sum(list(base_fns) + list(active_fns.values()), quad=quad)
        if sm.value < best_v:
            best_v = sm.value
            best_x = sm.x
            best_gi = gi

    consider(-1)
    k = 0
    gi = 0
    n_ev = len(events)
    while k < n_ev:
        pos = events[k][0]
        while k < n_ev and events[k][0] == pos:
            _, rank, idx = events[k]
            item = payload[idx]
            if isinstance(item, tuple):
                s = 1.0 if rank == 1 else -1.0
                A += s * item[0]
                B += s * item[1]
                C += s * item[2]
            elif rank == 1:
                active_fns[idx] = item
            else:
                del active_fns[idx]
            k += 1
        consider(gi)
        gi += 1
    return best_v, best_x, best_gi, pieces
