"""Deterministic benchmark harness.

All randomness flows through an explicit splitmix64 generator so a
(seed, replicate) pair reproduces bit-identical data on any platform and
any thread count.  Each replicate runs on its own spawned stream, so
reports do not depend on scheduling order.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import apps, baselines
from .quadform import Quadratic, TruncatedQuadratic
from .solver2d import minimize_sum_2d
from .solverhd import SparseTerm, SparseTruncatedSum

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # splitmix64 increment
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


class Rng:
    """splitmix64 stream with uniform/normal/exponential draws.

    uniform maps the top 53 bits to [0, 1); normal uses Box-Muller with
    one cached draw; exponential inverts the CDF.  spawn(k) derives an
    independent child stream for replicate or stage k.
    """

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK
        self._cached_normal = None

    def u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.u64() >> 11) * 2.0 ** -53
        return lo + (hi - lo) * u

    def normal(self, mu: float = 0.0, sd: float = 1.0) -> float:
        if self._cached_normal is not None:
            z = self._cached_normal
            self._cached_normal = None
        else:
            u1 = max(self.uniform(), 2.0 ** -53)
            u2 = self.uniform()
            r = math.sqrt(-2.0 * math.log(u1))
            z = r * math.cos(2.0 * math.pi * u2)
            self._cached_normal = r * math.sin(2.0 * math.pi * u2)
        return mu + sd * z

    def exponential(self, rate: float = 1.0) -> float:
        u = max(self.uniform(), 2.0 ** -53)
        return -math.log(u) / rate

    def int_below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK - (_MASK % n)
        while True:
            v = self.u64()
            if v < limit:
                return v % n

    def spawn(self, k: int) -> "Rng":
        return Rng(_mix(self._state ^ _mix((k + 1) * _GOLDEN & _MASK)))


# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------


def gen_quadratics_1d(rng: Rng, n: int, c: float = 1.0):
    """Downward parabolas truncated at 0: vertex m ~ U(0,1), half-width
    a ~ U(0.01, 0.5)/c, depth z ~ U(-10, -1); f crosses 0 at m -/+ a."""
    terms = []
    for _ in range(n):
        m = rng.uniform(0.0, 1.0)
        a = rng.uniform(0.01, 0.5) / c
        z = rng.uniform(-10.0, -1.0)
        curv = 2.0 * abs(z) / (a * a)
        q = Quadratic(np.array([[curv]]), np.array([-curv * m]),
                      0.5 * curv * m * m + z)
        terms.append(TruncatedQuadratic(q, 0.0))
    return terms


def gen_quadratics_2d(rng: Rng, n: int, c: float = 1.0):
    """Elliptic paraboloids truncated at 0.  Per term: angle
    theta ~ U(0, pi), semi-axes a ~ U(0.01, 0.5)/c and b ~ U(0.01, 0.5)
    of the zero level set, center ~ U(0,1)^2, depth z ~ U(-10, -1).
    Larger c elongates the level sets and hardens local methods."""
    terms = []
    for _ in range(n):
        theta = rng.uniform(0.0, math.pi)
        a = rng.uniform(0.01, 0.5) / c
        b = rng.uniform(0.01, 0.5)
        u = rng.uniform(0.0, 1.0)
        v = rng.uniform(0.0, 1.0)
        z = rng.uniform(-10.0, -1.0)
        ct, st = math.cos(theta), math.sin(theta)
        rot = np.array([[ct, -st], [st, ct]])
        diag = np.diag([2.0 * abs(z) / (a * a), 2.0 * abs(z) / (b * b)])
        A = rot @ diag @ rot.T
        m = np.array([u, v])
        q = Quadratic(A, -A @ m, 0.5 * m @ A @ m + z)
        terms.append(TruncatedQuadratic(q, 0.0))
    return terms


def gen_outlier_data(rng: Rng, n: int, frac: float, leverage: float = 0.0):
    """Line data y = 1 + 2 t + shift + noise with the first k cases
    shifted by 3 + Exp(rate 0.1).  leverage > 0 places outlier abscissas
    in [leverage, leverage + 1] instead of the clean U(-15, 15) range.

    Returns (X, y, true_flags) with X = [1, t]."""
    k = int(round(frac * n))
    t = np.empty(n)
    for i in range(n):
        if i < k and leverage > 0.0:
            t[i] = rng.uniform(leverage, leverage + 1.0)
        else:
            t[i] = rng.uniform(-15.0, 15.0)
    gamma = np.zeros(n)
    for i in range(k):
        gamma[i] = 3.0 + rng.exponential(0.1)
    eps = np.array([rng.normal() for _ in range(n)])
    X = np.column_stack([np.ones(n), t])
    y = 1.0 + 2.0 * t + gamma + eps
    flags = np.zeros(n, dtype=bool)
    flags[:k] = True
    return X, y, flags


def signal_template(d: int = 100) -> np.ndarray:
    """Piecewise signal: flat 0, a jump to a gentle ramp, a plateau, two
    sine periods, and a quadratic decay back to 0.  Segment length d/5."""
    if d % 5 != 0:
        raise ValueError("d must be a multiple of 5")
    s = d // 5
    t = np.arange(s)
    seg0 = np.zeros(s)
    seg1 = np.linspace(3.5, 5.0, s)
    seg2 = np.full(s, 5.0)
    seg3 = 5.0 + 2.0 * np.sin(4.0 * math.pi * t / s)
    seg4 = 5.0 * (1.0 - (t / (s - 1.0)) ** 2)
    return np.concatenate([seg0, seg1, seg2, seg3, seg4])


def gen_signal(rng: Rng, d: int = 100, noise_sd: float = 1.0):
    truth = signal_template(d)
    noisy = truth + np.array([rng.normal(0.0, noise_sd) for _ in range(d)])
    return truth, noisy


def step_image(shape=(64, 64)) -> np.ndarray:
    """Two-level step: left half 0.25, right half 0.75."""
    h, w = shape
    img = np.full((h, w), 0.25)
    img[:, w // 2:] = 0.75
    return img


def gen_image(rng: Rng, shape=(64, 64), noise_sd: float = 0.1):
    truth = step_image(shape)
    noise = np.array([rng.normal(0.0, noise_sd)
                      for _ in range(truth.size)]).reshape(shape)
    return truth, truth + noise


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def rmse(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def masking_pct(flags, truth) -> float:
    """Percent of true outliers that were NOT flagged."""
    flags = np.asarray(flags, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    k = int(truth.sum())
    if k == 0:
        return 0.0
    return 100.0 * float(np.sum(truth & ~flags)) / k


def swamping_pct(flags, truth) -> float:
    """Percent of clean cases that WERE flagged."""
    flags = np.asarray(flags, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    m = int((~truth).sum())
    if m == 0:
        return 0.0
    return 100.0 * float(np.sum(~truth & flags)) / m


def success(value: float, best: float, tol: float = 1e-5) -> float:
    """1.0 when value is within tol of the best known value."""
    return 1.0 if value <= best + tol else 0.0


def relative_loss(value: float, best: float) -> float:
    denom = max(abs(best), 1e-12)
    return (value - best) / denom


# ---------------------------------------------------------------------------
# experiment reports
# ---------------------------------------------------------------------------

CSV_HEADER = ("method", "metric", "mean", "stderr", "replicates", "seed")


@dataclass
class ExperimentReport:
    name: str
    seed: int
    replicates: int
    rows: list = field(default_factory=list)  # (method, metric, mean, stderr)
    elapsed: float = 0.0

    def to_csv(self, path: str) -> None:
        tmp = str(path) + ".tmp"
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for method, metric, mean, stderr in self.rows:
                writer.writerow([method, metric, "%.12g" % mean, "%.12g" % stderr,
                                 self.replicates, self.seed])
        os.replace(tmp, path)

    def mean_of(self, method: str, metric: str) -> float:
        for m, k, mean, _ in self.rows:
            if m == method and k == metric:
                return mean
        raise KeyError((method, metric))


def _aggregate(name, seed, replicates, samples, elapsed) -> ExperimentReport:
    rows = []
    for key in sorted(samples):
        vals = np.asarray(samples[key], dtype=float)
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        rows.append((key[0], key[1], mean, stderr))
    return ExperimentReport(name, seed, replicates, rows, elapsed)


def resolve_threads(threads=None) -> int:
    """threads=None reads STCF_THREADS; 0 or "0" means one per CPU."""
    if threads is None:
        raw = os.environ.get("STCF_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError("STCF_THREADS must be an integer, got %r" % raw) from None
    threads = int(threads)
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError("thread count must be >= 0")
    return threads


# ---------------------------------------------------------------------------
# replicate bodies
# ---------------------------------------------------------------------------


def _rep_quadratics2d(rng: Rng, params: dict) -> dict:
    n = params.get("n", 50)
    cs = params.get("cs", (1.0, 5.0, 10.0))
    out = {}
    for ci, c in enumerate(cs):
        sub = rng.spawn(ci)
        terms = gen_quadratics_2d(sub, n, c)
        exact = minimize_sum_2d(terms)
        ssum = SparseTruncatedSum(2, [SparseTerm((0, 1), t) for t in terms])
        dc = baselines.dc_minimize(ssum)
        tag = "C%g" % c
        out[("exact", "success_" + tag)] = 1.0
        out[("dc", "success_" + tag)] = success(dc.value, exact.value)
        out[("dc", "relative_loss_" + tag)] = relative_loss(dc.value, exact.value)
        out[("exact", "value_" + tag)] = exact.value
    return out


def _rep_outliers(rng: Rng, params: dict) -> dict:
    n = params.get("n", 100)
    fracs = params.get("fracs", (0.1, 0.6))
    lam = params.get("lam", 6.25)
    leverage = params.get("leverage", 0.0)
    out = {}
    for fi, frac in enumerate(fracs):
        sub = rng.spawn(fi)
        X, y, truth = gen_outlier_data(sub, n, frac, leverage)
        problem = apps.RegressionProblem(X, y, lam)
        fit = apps.detect_outliers(problem)
        ipod = baselines.theta_ipod(X, y, lam)
        tag = "o%d" % int(round(100 * frac))
        out[("exact", "masking_" + tag)] = masking_pct(fit.flags, truth)
        out[("exact", "swamping_" + tag)] = swamping_pct(fit.flags, truth)
        out[("ipod", "masking_" + tag)] = masking_pct(ipod.flags, truth)
        out[("ipod", "swamping_" + tag)] = swamping_pct(ipod.flags, truth)
    return out


def _rep_signal(rng: Rng, params: dict) -> dict:
    d = params.get("d", 100)
    w = params.get("w", 4.0)
    lam = params.get("lam", 9.0)
    truth, noisy = gen_signal(rng, d)
    fit = apps.restore_signal(noisy, w, lam)
    imo = baselines.imo_restore(noisy, w, lam)
    ssum = apps.restoration_sum(noisy, w, lam)
    dc = baselines.dc_minimize(ssum, x0=noisy.copy())
    best = min(fit.objective, imo.objective, dc.value)
    return {
        ("ccd", "rmse"): rmse(fit.x, truth),
        ("imo", "rmse"): rmse(imo.x, truth),
        ("dc", "rmse"): rmse(dc.x, truth),
        ("noisy", "rmse"): rmse(noisy, truth),
        ("ccd", "objective"): fit.objective,
        ("imo", "objective"): imo.objective,
        ("dc", "objective"): dc.value,
        ("ccd", "success"): success(fit.objective, best),
        ("imo", "success"): success(imo.objective, best),
        ("dc", "success"): success(dc.value, best),
        ("imo", "dc_gap"): abs(imo.objective - dc.value),
    }


def _rep_placement(rng: Rng, params: dict) -> dict:
    n = params.get("n", 30)
    resolution = params.get("resolution", 1500)
    shapes = params.get("shapes", (apps.ShapeSpec("circle", 0.2),
                                   apps.ShapeSpec("square", 0.35),
                                   apps.ShapeSpec("hexagon", 0.22)))
    points = np.array([[rng.uniform(), rng.uniform()] for _ in range(n)])
    out = {}
    for shape in shapes:
        res = apps.place_shape(points, shape)
        # the points are drawn in the unit square, so that is the scan domain
        _, grid_w = apps.coverage_grid_scan(points, shape, resolution=resolution,
                                            bounds=((0.0, 1.0), (0.0, 1.0)))
        out[("exact", "weight_" + shape.kind)] = res.weight
        out[("grid", "weight_" + shape.kind)] = grid_w
        out[("exact", "grid_match_" + shape.kind)] = 1.0 if res.weight == grid_w else 0.0
    return out


def _rep_image(rng: Rng, params: dict) -> dict:
    shape = params.get("shape", (64, 64))
    w = params.get("w", 2.0)
    lam = params.get("lam", 0.02)
    truth, noisy = gen_image(rng, shape)
    fit = apps.restore_image(noisy, w, lam)
    smoothed = baselines.gaussian_smooth(noisy, sigma=1.0, size=5)
    return {
        ("ccd", "rmse"): rmse(fit.x, truth),
        ("noisy", "rmse"): rmse(noisy, truth),
        ("smooth", "rmse"): rmse(smoothed, truth),
        ("ccd", "cycles"): float(fit.solution.iterations),
    }


_EXPERIMENTS = {
    "quadratics2d": _rep_quadratics2d,
    "outliers": _rep_outliers,
    "signal": _rep_signal,
    "placement": _rep_placement,
    "image": _rep_image,
}


def run_experiment(name: str, replicates: int = 20, seed: int = 0,
                   threads=None, **params) -> ExperimentReport:
    """Run `replicates` independent replicates of a named experiment and
    aggregate (mean, stderr) per (method, metric).  Replicate r uses the
    spawned stream Rng(seed).spawn(r), so results are identical for any
    thread count."""
    if name not in _EXPERIMENTS:
        raise ValueError("unknown experiment %r; choose from %s"
                         % (name, sorted(_EXPERIMENTS)))
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    body = _EXPERIMENTS[name]
    root = Rng(seed)
    nthreads = resolve_threads(threads)
    t0 = time.perf_counter()
    if nthreads == 1:
        results = [body(root.spawn(r), params) for r in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(lambda r: body(root.spawn(r), params),
                                    range(replicates)))
    elapsed = time.perf_counter() - t0
    samples = {}
    for rep in results:
        for key, val in rep.items():
            samples.setdefault(key, []).append(val)
    return _aggregate(name, seed, replicates, samples, elapsed)
