"""Exact 2-D minimization of sums of truncated convex terms.

Every cell of the arrangement of active-region boundaries has a constant
active set, and any active-set sum bounds the objective from below
everywhere, so it is enough to enumerate the sets realized by cells and
take the best unconstrained minimum.  Each boundary component is walked
clockwise through its sorted intersection points with the other
boundaries; between consecutive crossings the solver samples the arc
midpoint to refresh which regions contain the arc, then scores the
active set both with and without the traversed term (the cells on the
two sides of the arc).  The never-crossed outer cell is covered by a
probe on the wrap-around arc plus the base-only candidate.

Membership comes from containment tests at arc midpoints rather than
from toggling at each crossing, so tangential touches cannot corrupt
parity; a full membership-and-accumulator reseed every RESEED_EVERY
events guards against float drift on long walks.

Terms are either all TruncatedQuadratic (dim 2, lambda possibly +inf) or
all IndicatorTerm (shape placement); mixing the two families is not
supported.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry2d import (GeometryError, IndicatorTerm, boundary_of, components_of,
                         intersect_components, region_contains)
from .quadform import INF, PIVOT_RTOL, TruncatedQuadratic
from .solver1d import Solution

RESEED_EVERY = 64
_KEY_GROUP_RTOL = 1e-12


class _Problem:
    """Classified input: base accumulators plus toggleable curve terms."""

    def __init__(self, terms):
        terms = list(terms)
        n_quad = sum(isinstance(t, TruncatedQuadratic) for t in terms)
        n_ind = sum(isinstance(t, IndicatorTerm) for t in terms)
        if n_quad + n_ind != len(terms):
            bad = [type(t).__name__ for t in terms
                   if not isinstance(t, (TruncatedQuadratic, IndicatorTerm))]
            raise ValueError("unsupported term types: %s" % sorted(set(bad)))
        if n_quad and n_ind:
            raise ValueError("quadratic and indicator terms cannot be mixed")
        self.mode = "ind" if n_ind else "quad"
        self.terms = terms
        self.sum_lam = 0.0
        self.base = [0.0] * 6          # a11, a12, a22, b1, b2, c
        self.base_idx = []
        self.always_idx = []
        self.coeffs = {}               # idx -> normalized (a11,a12,a22,b1,b2,c-lam)
        self.weights = {}              # idx -> weight (indicator mode)
        self.lams = {}
        self.ucomps = []               # [{comp, owners}]
        self.curve_scale = 1.0
        by_sig = {}
        for i, t in enumerate(terms):
            if isinstance(t, TruncatedQuadratic):
                if t.dim != 2:
                    raise ValueError("term %d has dim %d, expected 2" % (i, t.dim))
                if t.lam != INF:
                    self.sum_lam += t.lam
                curve = boundary_of(t)
                co = _quad_coeffs(t)
                if t.lam == INF:
                    for k in range(6):
                        self.base[k] += co[k]
                    self.base_idx.append(i)
                    self.curve_scale += abs(co[0]) + abs(co[1]) + abs(co[2])
                    continue
                if curve is None:
                    amax = max(abs(co[0]), abs(co[1]), abs(co[2]))
                    bmax = max(abs(co[3]), abs(co[4]))
                    if amax <= PIVOT_RTOL * (amax + 1.0) and bmax <= PIVOT_RTOL * (bmax + 1.0):
                        if t.q.c <= t.lam:
                            self.base[5] += t.q.c - t.lam
                            self.always_idx.append(i)
                    # else: C_i is empty or a single point; dropping it is exact
                    continue
                self.coeffs[i] = (co[0], co[1], co[2], co[3], co[4], co[5] - t.lam)
                self.lams[i] = t.lam
                self.curve_scale += abs(co[0]) + abs(co[1]) + abs(co[2])
            else:
                curve = t.region
                self.weights[i] = t.weight
            for comp in components_of(curve):
                rec = by_sig.get(comp.signature)
                if rec is None:
                    rec = {"comp": comp, "owners": []}
                    by_sig[comp.signature] = rec
                    self.ucomps.append(rec)
                rec["owners"].append(i)
        self.tol = PIVOT_RTOL * self.curve_scale
        self.universe = sorted(self.coeffs) if self.mode == "quad" else sorted(self.weights)
        self._isect_cache = {}

    def active_at(self, k: int, x: float, y: float) -> bool:
        if self.mode == "ind":
            return region_contains(self.terms[k].region, (x, y))
        a11, a12, a22, b1, b2, cn = self.coeffs[k]
        g = 0.5 * (a11 * x * x + 2.0 * a12 * x * y + a22 * y * y) + b1 * x + b2 * y + cn
        lam = self.lams[k]
        return g <= 1e-9 * (1.0 + abs(lam))

    def intersections(self, u: int, v: int):
        key = (u, v) if u < v else (v, u)
        pts = self._isect_cache.get(key)
        if pts is None:
            pts = intersect_components(self.ucomps[key[0]]["comp"],
                                       self.ucomps[key[1]]["comp"])
            self._isect_cache[key] = pts
        return pts


def _quad_coeffs(t: TruncatedQuadratic):
    A, b = t.q.A, t.q.b
    return (float(A[0, 0]), float(A[0, 1]), float(A[1, 1]),
            float(b[0]), float(b[1]), t.q.c)


def _min2x2(a11, a12, a22, b1, b2, c, tol, px, py):
    """Unconstrained minimum of 0.5 x'Ax + b'x + c; (value, x, y) or None
    when unbounded below.  (px, py) is the witness for flat sums."""
    amax = max(abs(a11), abs(a12), abs(a22))
    if amax <= tol:
        return (c, px, py)
    det = a11 * a22 - a12 * a12
    if det > tol * max(a11, a22):
        x0 = (-b1 * a22 + b2 * a12) / det
        x1 = (-b2 * a11 + b1 * a12) / det
        # Evaluate at the solved point instead of using c + 0.5*b'x: the
        # shortcut picks up the solve error at first order (scaled by |b|),
        # while the evaluated value is off only at second order.
        v = (0.5 * (a11 * x0 * x0 + 2.0 * a12 * x0 * x1 + a22 * x1 * x1)
             + b1 * x0 + b2 * x1 + c)
        return (v, x0, x1)
    if a11 >= a22:
        u0, u1 = a11, a12
    else:
        u0, u1 = a12, a22
    nrm = math.hypot(u0, u1)
    if nrm <= tol:
        return (c, px, py)
    u0 /= nrm
    u1 /= nrm
    sigma = a11 + a22
    beta = b1 * u0 + b2 * u1
    if max(abs(b1 - beta * u0), abs(b2 - beta * u1)) > 1e-9 * (1.0 + abs(b1) + abs(b2)):
        return None
    t = -beta / sigma
    x0 = t * u0
    x1 = t * u1
    v = (0.5 * (a11 * x0 * x0 + 2.0 * a12 * x0 * x1 + a22 * x1 * x1)
         + b1 * x0 + b2 * x1 + c)
    return (v, x0, x1)


class _Sweep:
    """Shared traversal engine; optionally collects every candidate set."""

    def __init__(self, prob: _Problem, collect: bool):
        self.prob = prob
        self.collect = collect
        self.sets = set() if collect else None
        self.best_v = INF
        self.best_x = (0.0, 0.0)
        self.best_set = frozenset()
        self.pieces = 0
        self.drift_fixes = 0
        # running state
        self.cur = set()
        self.acc = [0.0] * 6
        self.wsum = 0.0

    # -- state maintenance ------------------------------------------------
    def _reset_state(self, point):
        p = self.prob
        x, y = float(point[0]), float(point[1])
        self.cur = {k for k in p.universe if p.active_at(k, x, y)}
        self._refresh_accumulators()

    def _refresh_accumulators(self):
        p = self.prob
        if p.mode == "quad":
            acc = list(p.base)
            for k in self.cur:
                co = p.coeffs[k]
                for j in range(6):
                    acc[j] += co[j]
            self.acc = acc
        else:
            self.wsum = sum(p.weights[k] for k in self.cur)

    def _set_membership(self, k, val):
        p = self.prob
        if val and k not in self.cur:
            self.cur.add(k)
            if p.mode == "quad":
                co = p.coeffs[k]
                for j in range(6):
                    self.acc[j] += co[j]
            else:
                self.wsum += p.weights[k]
        elif not val and k in self.cur:
            self.cur.remove(k)
            if p.mode == "quad":
                co = p.coeffs[k]
                for j in range(6):
                    self.acc[j] -= co[j]
            else:
                self.wsum -= p.weights[k]

    # -- candidate scoring --------------------------------------------------
    def _consider(self, owners_out, px, py):
        """Score the current set, and the set minus owners_out (may be [])."""
        p = self.prob
        if p.mode == "quad":
            a11, a12, a22, b1, b2, c = self.acc
            self.pieces += 1
            got = _min2x2(a11, a12, a22, b1, b2, c, p.tol, px, py)
            if got is not None and got[0] < self.best_v:
                self.best_v, bx, by = got[0], got[1], got[2]
                self.best_x = (bx, by)
                self.best_set = frozenset(self.cur)
            if self.collect:
                self.sets.add(frozenset(self.cur))
            inside = [k for k in owners_out if k in self.cur]
            if inside:
                for k in inside:
                    co = p.coeffs[k]
                    a11 -= co[0]
                    a12 -= co[1]
                    a22 -= co[2]
                    b1 -= co[3]
                    b2 -= co[4]
                    c -= co[5]
                self.pieces += 1
                got = _min2x2(a11, a12, a22, b1, b2, c, p.tol, px, py)
                if got is not None and got[0] < self.best_v:
                    self.best_v = got[0]
                    self.best_x = (got[1], got[2])
                    self.best_set = frozenset(self.cur.difference(inside))
                if self.collect:
                    self.sets.add(frozenset(self.cur.difference(inside)))
        else:
            self.pieces += 1
            v = -self.wsum
            if v < self.best_v:
                self.best_v = v
                self.best_x = (px, py)
                self.best_set = frozenset(self.cur)
            if self.collect:
                self.sets.add(frozenset(self.cur))
            inside = [k for k in owners_out if k in self.cur]
            if inside:
                self.pieces += 1
                v = -(self.wsum - sum(p.weights[k] for k in inside))
                if v < self.best_v:
                    self.best_v = v
                    self.best_x = (px, py)
                    self.best_set = frozenset(self.cur.difference(inside))
                if self.collect:
                    self.sets.add(frozenset(self.cur.difference(inside)))

    # -- traversal ----------------------------------------------------------
    def run(self):
        p = self.prob
        # base-only candidate (the outer cell / nothing covered)
        self.cur = set()
        self._refresh_accumulators()
        self._consider([], 0.0, 0.0)
        for rec in p.ucomps:
            self._walk(rec)
        return self

    def _walk(self, rec):
        p = self.prob
        comp = rec["comp"]
        owners = rec["owners"]
        events = []
        u = p.ucomps.index(rec)
        for v, other in enumerate(p.ucomps):
            if other is rec or other["comp"].signature == comp.signature:
                continue
            for pt in p.intersections(u, v):
                events.append((comp.key_of(pt), other["owners"]))
        events.sort(key=lambda e: e[0])
        closed = comp.period is not None
        if not events:
            probe = comp.point_at(0.0)
            self._reset_state(probe)
            self._consider(owners, float(probe[0]), float(probe[1]))
            return
        groups = []
        for key, partners in events:
            if groups and key - groups[-1][0][-1] <= _KEY_GROUP_RTOL * (1.0 + abs(key)):
                groups[-1][0].append(key)
                groups[-1][1].extend(partners)
            else:
                groups.append(([key], list(partners)))
        first_key = groups[0][0][0]
        last_key = groups[-1][0][-1]
        if closed:
            probe_key = 0.5 * (last_key + first_key + comp.period)
        else:
            probe_key = last_key + 1.0
        probe = comp.point_at(probe_key)
        self._reset_state(probe)
        self._consider(owners, float(probe[0]), float(probe[1]))
        seen = 0
        G = len(groups)
        for j, (keys, partners) in enumerate(groups):
            if j + 1 < G:
                next_key = groups[j + 1][0][0]
            elif closed:
                next_key = first_key + comp.period
            else:
                next_key = keys[-1] + 2.0
            mid = comp.point_at(0.5 * (keys[-1] + next_key))
            mx, my = float(mid[0]), float(mid[1])
            for k in partners:
                self._set_membership(k, p.active_at(k, mx, my))
            # the walked boundary itself passes through the arc
            for k in owners:
                if k in p.coeffs or k in p.weights:
                    self._set_membership(k, True)
            seen += len(keys)
            if seen >= RESEED_EVERY:
                seen = 0
                fresh = {k for k in p.universe if p.active_at(k, mx, my)}
                if fresh != self.cur:
                    self.drift_fixes += 1
                    self.cur = fresh
                self._refresh_accumulators()
            self._consider(owners, mx, my)


def _solve(terms, collect: bool):
    prob = _Problem(terms)
    sweep = _Sweep(prob, collect).run()
    active = set(sweep.best_set) | set(prob.base_idx) | set(prob.always_idx)
    sol = Solution(
        x=np.array([sweep.best_x[0], sweep.best_x[1]]),
        value=sweep.best_v + prob.sum_lam,
        active=frozenset(active),
        pieces_visited=sweep.pieces,
        iterations=0,
        info={"drift_fixes": sweep.drift_fixes},
    )
    return sol, sweep.sets


def minimize_sum_2d(terms) -> Solution:
    """Global minimum of sum_i min{f_i(x), lambda_i} over the plane.

    terms: all TruncatedQuadratic (dim 2), or all IndicatorTerm."""
    sol, _ = _solve(terms, collect=False)
    return sol


def enumerate_candidate_sets(terms) -> set:
    """Every active set the traversal scores (frozensets of indices of
    truncatable terms; never-truncated terms are implicit)."""
    _, sets = _solve(terms, collect=True)
    return sets
