"""Quadratic forms, truncated quadratics, and exact active-sum maintenance.

A quadratic is q(x) = 0.5 x'Ax + b'x + c with A symmetric positive
semidefinite for every function handled by the exact solvers.  Sums of
active terms are maintained coefficient-wise, so adding or removing a term
costs O(dim^2) and minimization of the running sum is closed form for
dim <= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

# Rank decisions scale with the largest curvature magnitude seen by the
# caller; standalone calls fall back to the matrix's own largest entry.
PIVOT_RTOL = 1e-12
_RANGE_RTOL = 1e-9


def _frozen_array(values, shape_hint=None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if shape_hint is not None:
        arr = arr.reshape(shape_hint)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Quadratic:
    """q(x) = 0.5 x'Ax + b'x + c; A is symmetrized on construction."""

    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be a square matrix")
        A = 0.5 * (A + A.T)
        b = np.array(self.b, dtype=float).reshape(-1)
        if b.shape[0] != A.shape[0]:
            raise ValueError("b length %d does not match A dim %d" % (b.shape[0], A.shape[0]))
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @classmethod
    def zero(cls, dim: int) -> "Quadratic":
        return cls(np.zeros((dim, dim)), np.zeros(dim), 0.0)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        return float(0.5 * x @ self.A @ x + self.b @ x + self.c)

    def __add__(self, other: "Quadratic") -> "Quadratic":
        return Quadratic(self.A + other.A, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "Quadratic") -> "Quadratic":
        return Quadratic(self.A - other.A, self.b - other.b, self.c - other.c)

    def scaled(self, t: float) -> "Quadratic":
        return Quadratic(t * self.A, t * self.b, t * self.c)

    def shifted(self, dc: float) -> "Quadratic":
        """Same quadratic with dc added to the constant term."""
        return Quadratic(self.A, self.b, self.c + dc)


@dataclass(frozen=True)
class QuadMin:
    """Result of minimizing a quadratic.

    kind is "unique" (PD, one minimizer), "flat" (singular PSD, x is the
    least-norm minimizer of a whole affine set), or "unbounded" (infimum
    -inf; x is None and value is -inf).
    """

    kind: str
    x: np.ndarray | None
    value: float

    @property
    def bounded(self) -> bool:
        return self.kind != "unbounded"


_UNBOUNDED = QuadMin("unbounded", None, -INF)


def minimize(q: Quadratic, scale: float | None = None) -> QuadMin:
    """Closed-form minimization for dim 1 or 2.

    scale, when given, is the curvature magnitude of the surrounding
    problem (e.g. the sum of |A| entries over all terms); rank decisions
    use PIVOT_RTOL relative to it so that cancellation residue left by
    add/remove sequences is treated as zero.
    """
    d = q.dim
    if d == 1:
        return _minimize_1d(float(q.A[0, 0]), float(q.b[0]), q.c, scale)
    if d == 2:
        return _minimize_2d(q.A, q.b, q.c, scale)
    raise ValueError("closed-form minimize supports dim 1 or 2, got %d" % d)


def _minimize_1d(a: float, b: float, c: float, scale: float | None) -> QuadMin:
    ref = abs(a) if scale is None else scale
    tol = PIVOT_RTOL * ref
    if a > tol:
        x = -b / a
        return QuadMin("unique", _frozen_array([x]), x * (0.5 * a * x + b) + c)
    if abs(a) <= tol:
        if abs(b) <= PIVOT_RTOL * (1.0 + abs(b) + ref):
            return QuadMin("flat", _frozen_array([0.0]), c)
        return _UNBOUNDED
    return _UNBOUNDED


def _minimize_2d(A: np.ndarray, b: np.ndarray, c: float, scale: float | None) -> QuadMin:
    a11 = float(A[0, 0])
    a12 = float(A[0, 1])
    a22 = float(A[1, 1])
    amax = max(abs(a11), abs(a12), abs(a22))
    ref = amax if scale is None else scale
    tol = PIVOT_RTOL * ref
    if amax <= tol:
        if max(abs(float(b[0])), abs(float(b[1]))) <= PIVOT_RTOL * (1.0 + ref + float(np.abs(b).max(initial=0.0))):
            return QuadMin("flat", _frozen_array([0.0, 0.0]), c)
        return _UNBOUNDED
    if a11 < -tol or a22 < -tol:
        return _UNBOUNDED
    det = a11 * a22 - a12 * a12
    if det > tol * max(a11, a22):
        # positive definite: Cramer
        x0 = (-b[0] * a22 + b[1] * a12) / det
        x1 = (-b[1] * a11 + b[0] * a12) / det
        # Evaluate at the solved point; the c + 0.5*b'x stationary-point
        # identity amplifies the Cramer solve error by |b|.
        v = (0.5 * (a11 * x0 * x0 + 2.0 * a12 * x0 * x1 + a22 * x1 * x1)
             + b[0] * x0 + b[1] * x1 + c)
        return QuadMin("unique", _frozen_array([x0, x1]), float(v))
    if det < -tol * max(a11, a22, tol):
        return _UNBOUNDED
    # numerically rank <= 1
    p = 0 if a11 >= a22 else 1
    col = np.array([A[0, p], A[1, p]], dtype=float)
    nrm = math.hypot(col[0], col[1])
    if nrm <= tol:
        bmax = max(abs(float(b[0])), abs(float(b[1])))
        if bmax <= _RANGE_RTOL * (1.0 + ref):
            return QuadMin("flat", _frozen_array([0.0, 0.0]), c)
        return _UNBOUNDED
    u = col / nrm
    sigma = a11 + a22  # rank-1 PSD: the nonzero eigenvalue equals the trace
    beta = float(b @ u)
    resid = b - beta * u
    if float(np.abs(resid).max()) > _RANGE_RTOL * (1.0 + float(np.abs(b).max())):
        return _UNBOUNDED
    t = -beta / sigma
    x = t * u
    v = 0.5 * float(x @ A @ x) + float(b @ x) + c
    return QuadMin("flat", _frozen_array(x), float(v))


@dataclass(frozen=True)
class TruncatedQuadratic:
    """min{q(x), lam}; lam may be +inf for a never-truncated term."""

    q: Quadratic
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if math.isnan(lam) or lam == -INF:
            raise ValueError("lambda must be a real number or +inf")
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self) -> int:
        return self.q.dim

    def __call__(self, x) -> float:
        return min(self.q(x), self.lam)

    def to_json_dict(self) -> dict:
        return {
            "A": self.q.A.tolist(),
            "b": self.q.b.tolist(),
            "c": self.q.c,
            "lambda": "inf" if self.lam == INF else self.lam,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TruncatedQuadratic":
        try:
            A = d["A"]
            b = d["b"]
            c = d["c"]
            lam = d["lambda"]
        except KeyError as e:
            raise ValueError("term missing field %s" % e) from None
        if isinstance(lam, str):
            if lam.strip().lower() in ("inf", "+inf", "infinity"):
                lam = INF
            else:
                raise ValueError("lambda string must be 'inf', got %r" % lam)
        return cls(Quadratic(A, b, c), float(lam))


@dataclass(frozen=True)
class ActiveSum:
    """Running sum of quadratic terms indexed by integer ids.

    Immutable: add/remove return new sums.  total always equals the
    coefficient-wise sum of the current terms (up to float roundoff).
    """

    indices: frozenset
    total: Quadratic

    @classmethod
    def empty(cls, dim: int) -> "ActiveSum":
        return cls(frozenset(), Quadratic.zero(dim))

    def add(self, k: int, q: Quadratic) -> "ActiveSum":
        if k in self.indices:
            raise ValueError("index %d already active" % k)
        return ActiveSum(self.indices | {k}, self.total + q)

    def remove(self, k: int, q: Quadratic) -> "ActiveSum":
        if k not in self.indices:
            raise ValueError("index %d not active" % k)
        return ActiveSum(self.indices - {k}, self.total - q)

    def __call__(self, x) -> float:
        return self.total(x)

    def minimize(self, scale: float | None = None) -> QuadMin:
        return minimize(self.total, scale)
