"""Reference iterative methods: hard-threshold regression (IPOD-style),
difference-of-convex iteration, alternating restoration, and plain
Gaussian smoothing.  All are local heuristics used for comparison
against the exact solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .quadform import INF
from .solver1d import Solution
from .solverhd import SparseTruncatedSum


def hard_threshold(z, t):
    """Theta_h(z; t): keep entries with |z| > t, zero the rest."""
    z = np.asarray(z, dtype=float)
    return np.where(np.abs(z) > t, z, 0.0)


@dataclass
class IpodFit:
    beta: np.ndarray
    gamma: np.ndarray
    flags: np.ndarray
    iterations: int
    converged: bool


def theta_ipod(X, y, lam, gamma0=None, tol=1e-8, max_iter=10000) -> IpodFit:
    """Alternating hard-threshold fit of y = X beta + gamma + noise.

    Iterates gamma <- Theta_h(H gamma + (I - H) y; sqrt(lam)) with the
    hat matrix H, starting from gamma = 0, then refits beta by least
    squares on y - gamma.  Converges to a local pattern; may mask
    clustered outliers."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, p) and y (n,) with matching n")
    if lam <= 0:
        raise ValueError("lam must be positive")
    n = X.shape[0]
    xtx = X.T @ X
    xtx_cf = scipy.linalg.cho_factor(xtx)
    H = X @ scipy.linalg.cho_solve(xtx_cf, X.T)
    r = y - H @ y
    thresh = math.sqrt(lam)
    gamma = np.zeros(n) if gamma0 is None else np.asarray(gamma0, dtype=float).copy()
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        gnew = hard_threshold(H @ gamma + r, thresh)
        delta = np.max(np.abs(gnew - gamma)) if n else 0.0
        gamma = gnew
        if delta < tol:
            converged = True
            break
    beta = scipy.linalg.cho_solve(xtx_cf, X.T @ (y - gamma))
    return IpodFit(beta, gamma, gamma != 0.0, it, converged)


def dc_minimize(ssum: SparseTruncatedSum, x0=None, tol=1e-8, max_iter=10000) -> Solution:
    """Difference-of-convex iteration for a truncated quadratic sum.

    Writes the objective as (sum of full quadratics) minus a convex
    remainder, linearizes the remainder at the current point, and solves
    the resulting quadratic exactly.  Each step solves A_tot x = rhs
    with the *full* (untruncated) Hessian A_tot, factored once.  The
    default start is the minimizer of the untruncated sum; starting at a
    point where every term is truncated is a fixed point."""
    if not ssum.all_quadratic:
        raise ValueError("difference-of-convex iteration needs quadratic terms")
    d = ssum.dim
    terms = ssum.terms
    rows, cols, vals = [], [], []
    b_tot = np.zeros(d)
    for t in terms:
        idx = np.asarray(t.support)
        k = idx.shape[0]
        rows.append(np.repeat(idx, k))
        cols.append(np.tile(idx, k))
        vals.append(t.fn.q.A.reshape(-1))
        b_tot[idx] += t.fn.q.b
    a_coo = sp.coo_matrix((np.concatenate(vals),
                           (np.concatenate(rows), np.concatenate(cols))),
                          shape=(d, d))
    if d <= 200:
        cf = scipy.linalg.cho_factor(a_coo.toarray())
        solve = lambda rhs: scipy.linalg.cho_solve(cf, rhs)
    else:
        lu = spla.splu(a_coo.tocsc())
        solve = lu.solve

    if x0 is None:
        x = solve(-b_tot)
    else:
        x = np.asarray(x0, dtype=float).copy()
        if x.shape != (d,):
            raise ValueError("x0 must have shape (%d,)" % d)

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        grad_trunc = np.zeros(d)
        for t in terms:
            xs = x[list(t.support)]
            if t.fn.q(xs) > t.fn.lam:
                grad_trunc[list(t.support)] += t.fn.q.A @ xs + t.fn.q.b
        xnew = solve(grad_trunc - b_tot)
        delta = np.max(np.abs(xnew - x))
        x = xnew
        if delta < tol:
            converged = True
            break
    value = ssum.value(x)
    active = frozenset(np.flatnonzero(ssum.active_mask(x)).tolist())
    return Solution(x=x, value=value, active=active, pieces_visited=0,
                    iterations=it, info={"converged": converged, "method": "dc"})


def chain_pairs(n: int):
    """Consecutive-index pairs of a length-n signal."""
    return [(j, j + 1) for j in range(n - 1)]


def grid_pairs(shape):
    """Right and down neighbor pairs of an image, row-major flat indices."""
    h, w = shape
    pairs = []
    for i in range(h):
        for j in range(w):
            k = i * w + j
            if j + 1 < w:
                pairs.append((k, k + 1))
            if i + 1 < h:
                pairs.append((k, k + w))
    return pairs


@dataclass
class RestoreFit:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    info: dict = field(default_factory=dict)


def imo_restore(y, w, lam, x0=None, tol=1e-8, max_iter=10000) -> RestoreFit:
    """Alternating restoration of a signal (1-D) or image (2-D).

    Minimizes sum_j (x_j - y_j)^2 + w * sum_pairs min((x_i - x_j)^2, lam)
    by alternating a hard threshold on the difference map Phi x at
    sqrt(lam) with a linear solve (I + w Phi^T Phi) x = y + w Phi^T a.
    The system matrix is factored once."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        pairs = chain_pairs(y.shape[0])
    elif y.ndim == 2:
        pairs = grid_pairs(y.shape)
    else:
        raise ValueError("y must be 1-D or 2-D")
    if w <= 0 or lam <= 0:
        raise ValueError("w and lam must be positive")
    yf = y.reshape(-1)
    d = yf.shape[0]
    m = len(pairs)
    rows = np.repeat(np.arange(m), 2)
    cols = np.array(pairs, dtype=np.int64).reshape(-1)
    vals = np.tile([-1.0, 1.0], m)
    phi = sp.csr_matrix((vals, (rows, cols)), shape=(m, d))
    system = (sp.identity(d, format="csr") + w * (phi.T @ phi)).tocsc()
    lu = spla.splu(system)
    thresh = math.sqrt(lam)
    x = yf.copy() if x0 is None else np.asarray(x0, dtype=float).reshape(-1).copy()
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        a = hard_threshold(phi @ x, thresh)
        xnew = lu.solve(yf + w * (phi.T @ a))
        delta = np.max(np.abs(xnew - x))
        x = xnew
        if delta < tol:
            converged = True
            break
    diffs = phi @ x
    objective = float(np.sum((x - yf) ** 2)
                      + w * np.sum(np.minimum(diffs ** 2, lam)))
    return RestoreFit(x.reshape(y.shape), objective, it, converged)


def gaussian_smooth(img, sigma=1.0, size=5):
    """Separable Gaussian blur with reflect padding (1-D or 2-D input)."""
    img = np.asarray(img, dtype=float)
    if size < 1 or size % 2 == 0:
        raise ValueError("size must be odd and positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    c = size // 2
    t = np.arange(size) - c
    kernel = np.exp(-(t ** 2) / (2.0 * sigma ** 2))
    kernel /= kernel.sum()
    out = img
    for axis in range(img.ndim):
        pad = [(0, 0)] * img.ndim
        pad[axis] = (c, c)
        padded = np.pad(out, pad, mode="reflect")
        acc = np.zeros_like(out)
        for s in range(size):
            sl = [slice(None)] * img.ndim
            sl[axis] = slice(s, s + out.shape[axis])
            acc += kernel[s] * padded[tuple(sl)]
        out = acc
    return out
