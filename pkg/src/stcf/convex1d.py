"""Scalar convex functions: derivative root finding and level crossings.

Functions are given by callables for f, f', and optionally f''.  All
routines are safeguarded Newton iterations inside a sign-change bracket,
with bisection fallback, so they tolerate flat or stiff derivatives.
Monotone functions (infimum approached at +-infinity, e.g. exp terms with
zero counts) are handled by reporting the reachable floating-point limit
instead of failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

INF = math.inf

GRAD_RTOL = 1e-9       # |sum f'(x*)| <= GRAD_RTOL * (1 + sum |f'(0)|)
CROSS_RTOL = 1e-10     # |f(l) - level| <= CROSS_RTOL * (1 + |level|)
TANGENT_RTOL = 1e-12   # min f within this of the level counts as tangent
_MAX_EXPAND = 200
_MAX_NEWTON = 200


class ConvexDivergenceError(RuntimeError):
    """Raised when a sum is unbounded below or iteration stalls.

    bracket holds (lo, hi, d_lo, d_hi), the last bracket and derivative
    signs seen, so callers can report the failing state.
    """

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class ConvexScalarFn:
    """A convex function of one variable.

    f and df are required; d2f may be None (secant fallback is used).
    hint seeds bracketing, e.g. the minimizer location if known roughly.
    """

    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Optional[Callable[[float], float]] = None
    hint: float = 0.0

    def __call__(self, x: float) -> float:
        return float(self.f(x))


def quadratic_fn(a: float, b: float, c: float, hint: float | None = None) -> ConvexScalarFn:
    """0.5*a*x^2 + b*x + c as a ConvexScalarFn (a >= 0)."""
    if a < 0:
        raise ValueError("quadratic_fn needs a >= 0, got %g" % a)
    if hint is None:
        hint = -b / a if a > 0 else 0.0
    return ConvexScalarFn(
        f=lambda x: 0.5 * a * x * x + b * x + c,
        df=lambda x: a * x + b,
        d2f=lambda x: a,
        hint=hint,
    )


@dataclass(frozen=True)
class ScalarMin:
    """kind: "interior" (stationary point), "left_limit"/"right_limit"
    (monotone; x is the far point where the value stopped changing)."""

    kind: str
    x: float
    value: float


def _total_df(fns, quad):
    a, b = (quad[0], quad[1]) if quad is not None else (0.0, 0.0)

    def D(x: float) -> float:
        s = a * x + b
        for g in fns:
            s += g.df(x)
        return s

    return D


def _total_f(fns, quad):
    a, b, c = quad if quad is not None else (0.0, 0.0, 0.0)

    def F(x: float) -> float:
        s = 0.5 * a * x * x + b * x + c
        for g in fns:
            s += g.f(x)
        return s

    return F


def _total_d2(fns, quad):
    if any(g.d2f is None for g in fns):
        return None
    a = quad[0] if quad is not None else 0.0

    def H(x: float) -> float:
        s = a
        for g in fns:
            s += g.d2f(x)
        return s

    return H


def _grad_tol(fns, quad) -> float:
    b = quad[1] if quad is not None else 0.0
    s = abs(b)
    for g in fns:
        s += abs(g.df(0.0))
    return GRAD_RTOL * (1.0 + s)


def _bracket_root(D, x0: float, F=None):
    """Expand from x0 to a sign-change bracket of the nondecreasing D.

    Returns ("interior", lo, hi) with D(lo) <= 0 <= D(hi), or
    ("left_limit"/"right_limit", far, far) when D keeps one sign; in the
    limit cases F (if given) is checked for boundedness and divergence
    raises ConvexDivergenceError.
    """
    d0 = D(x0)
    if d0 == 0.0:
        return "interior", x0, x0
    step = 1.0 + abs(x0)
    if d0 > 0.0:
        hi, lo = x0, x0 - step
        prev_val = F(hi) if F is not None else None
        for _ in range(_MAX_EXPAND):
            dlo = D(lo)
            if dlo <= 0.0:
                return "interior", lo, hi
            if F is not None:
                val = F(lo)
                if val < -1e100:
                    raise ConvexDivergenceError(
                        "sum unbounded below toward -inf", bracket=(lo, hi, dlo, d0))
                if val == prev_val:
                    return "left_limit", lo, lo
                prev_val = val
            hi = lo
            step *= 2.0
            lo -= step
        # a function with a finite limit stabilizes in far fewer doublings
        raise ConvexDivergenceError("no derivative sign change toward -inf",
                                    bracket=(lo, hi, None, d0))
    hi, lo = x0 + step, x0
    prev_val = F(lo) if F is not None else None
    for _ in range(_MAX_EXPAND):
        dhi = D(hi)
        if dhi >= 0.0:
            return "interior", lo, hi
        if F is not None:
            val = F(hi)
            if val < -1e100:
                raise ConvexDivergenceError(
                    "sum unbounded below toward +inf", bracket=(lo, hi, d0, dhi))
            if val == prev_val:
                return "right_limit", hi, hi
            prev_val = val
        lo = hi
        step *= 2.0
        hi += step
    # a function with a finite limit stabilizes in far fewer doublings
    raise ConvexDivergenceError("no derivative sign change toward +inf",
                                bracket=(lo, hi, d0, None))


def _newton_in_bracket(D, H, lo: float, hi: float, gtol: float) -> float:
    """Root of nondecreasing D inside [lo, hi] (D(lo) <= 0 <= D(hi)).

    Newton steps alternate with bisection so the bracket shrinks
    geometrically even where curvature varies by many orders of
    magnitude."""
    x = 0.5 * (lo + hi)
    for it in range(_MAX_NEWTON):
        d = D(x)
        if abs(d) <= gtol:
            return x
        if d > 0.0:
            hi = x
        else:
            lo = x
        width = hi - lo
        if width <= 1e-15 * (1.0 + abs(lo) + abs(hi)):
            return x
        trial = None
        if it % 2 == 0:
            h = H(x) if H is not None else None
            if h is not None and h > 0.0 and math.isfinite(h) and math.isfinite(d):
                step = d / h
                for _ in range(4):
                    t = x - step
                    if lo < t < hi:
                        trial = t
                        break
                    step *= 0.5
        if trial is None or trial == x:
            trial = 0.5 * (lo + hi)
        x = trial
    d = D(x)
    if abs(d) <= 1e3 * gtol:
        return x
    raise ConvexDivergenceError("derivative root stalled after %d iterations" % _MAX_NEWTON,
                                bracket=(lo, hi, D(lo), D(hi)))


def minimize_convex_sum(fns: Sequence[ConvexScalarFn], quad=None) -> ScalarMin:
    """Minimize sum of convex scalar functions plus an optional quadratic.

    quad is an (a, b, c) triple meaning 0.5*a*x^2 + b*x + c.  Returns a
    ScalarMin; kind "interior" satisfies |D(x*)| <= GRAD_RTOL*(1+sum|f'(0)|).
    Raises ConvexDivergenceError when the sum is unbounded below.
    """
    fns = list(fns)
    if not fns and (quad is None or (quad[0] == 0.0 and quad[1] == 0.0)):
        c = quad[2] if quad is not None else 0.0
        return ScalarMin("interior", 0.0, float(c))
    D = _total_df(fns, quad)
    F = _total_f(fns, quad)
    H = _total_d2(fns, quad)
    hints = [g.hint for g in fns]
    if quad is not None and quad[0] > 0.0:
        hints.append(-quad[1] / quad[0])
    x0 = sum(hints) / len(hints) if hints else 0.0
    kind, lo, hi = _bracket_root(D, x0, F)
    if kind != "interior":
        return ScalarMin(kind, lo, F(lo))
    x = _newton_in_bracket(D, H, lo, hi, _grad_tol(fns, quad))
    return ScalarMin("interior", x, F(x))


def _newton_crossing(f, df, level: float, lo: float, hi: float, increasing: bool) -> float:
    """Solve f(x) = level inside [lo, hi] where f is monotone on it.

    Newton steps alternate with bisection so the bracket shrinks
    geometrically even where the slope varies by many orders of
    magnitude (e.g. descending an exponential from far above the level).
    """
    tol = CROSS_RTOL * (1.0 + abs(level))
    x = 0.5 * (lo + hi)
    for it in range(_MAX_NEWTON):
        r = f(x) - level
        if abs(r) <= tol:
            return x
        high_side = (r > 0.0) == increasing
        if high_side:
            hi = x
        else:
            lo = x
        if hi - lo <= 1e-15 * (1.0 + abs(lo) + abs(hi)):
            return x
        trial = None
        if it % 2 == 0:
            d = df(x)
            if d != 0.0 and math.isfinite(d) and math.isfinite(r):
                step = r / d
                for _ in range(4):
                    t = x - step
                    if lo < t < hi:
                        trial = t
                        break
                    step *= 0.5
        if trial is None or trial == x:
            trial = 0.5 * (lo + hi)
        x = trial
    raise ConvexDivergenceError("level crossing stalled", bracket=(lo, hi, f(lo), f(hi)))


def _expand_above(f, level: float, start: float, direction: float):
    """March from start until f > level; returns bracket end or None."""
    step = 1.0 + abs(start)
    x = start
    for _ in range(_MAX_EXPAND):
        x = x + direction * step
        if f(x) > level:
            return x
        step *= 2.0
    return None


def crossing_interval(fn: ConvexScalarFn, level: float):
    """The closed interval where fn <= level, or None when min fn > level.

    Ends may be -inf/+inf when fn is monotone or plateaus below the level
    in that direction.  Finite ends l satisfy
    |fn(l) - level| <= CROSS_RTOL * (1 + |level|).
    """
    m = minimize_convex_sum([fn])
    tangent_tol = TANGENT_RTOL * (1.0 + abs(level))
    if m.value > level + tangent_tol:
        return None
    if m.kind == "left_limit":
        left = -INF
    elif m.kind == "right_limit":
        left = None  # fn decreasing: left crossing is a real root
    else:
        left = None
    if m.value >= level - tangent_tol and m.kind == "interior":
        return (m.x, m.x)

    if left is None:
        lo_end = _expand_above(fn.f, level, m.x, -1.0)
        if lo_end is None:
            left = -INF
        else:
            left = _newton_crossing(fn.f, fn.df, level, lo_end, m.x, increasing=False)
            # increasing=False: on [lo_end, m.x] fn decreases toward the min
    if m.kind == "right_limit":
        right = INF
    else:
        hi_end = _expand_above(fn.f, level, m.x, +1.0)
        if hi_end is None:
            right = INF
        else:
            right = _newton_crossing(fn.f, fn.df, level, m.x, hi_end, increasing=True)
    return (left, right)
