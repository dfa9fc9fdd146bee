"""Exact 2-D minimization by boundary traversal.

Three truncated bowls min{0.5 c |x - m|^2 + depth, 0} with negative
depths: each is a "sunken disk" that pays its depth inside a circle and
nothing outside.  The minimum of the sum sits where the deepest disks
overlap.  Candidates live on region boundaries and their intersections,
so the solver walks each circle, splits it at intersection events, and
minimizes the active sum on one cell per arc; the subset oracle
re-derives the same value by brute force over truncation patterns.
"""

import argparse

import numpy as np

from stcf import Quadratic, TruncatedQuadratic, minimize_sum_2d, subset_oracle


def bowl(center, curvature, depth):
    m = np.asarray(center, dtype=float)
    A = curvature * np.eye(2)
    b = -curvature * m
    c = 0.5 * curvature * float(m @ m) + depth
    return TruncatedQuadratic(Quadratic(A, b, c), 0.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.parse_args()

    terms = [
        bowl((0.0, 0.0), 2.0, -1.0),
        bowl((1.0, 0.0), 2.0, -1.2),
        bowl((0.5, 0.8), 2.0, -0.7),
    ]
    for i, t in enumerate(terms):
        m = np.linalg.solve(t.q.A, -t.q.b)
        print("disk %d: center (%.2f, %.2f), depth %.2f, radius %.3f"
              % (i, m[0], m[1], t.q(m), np.sqrt(-2.0 * t.q(m) / t.q.A[0, 0])))

    sol = minimize_sum_2d(terms)
    ref = subset_oracle(terms)
    print("boundary traversal: value %.9f at (%.6f, %.6f), active %s, "
          "%d arcs visited" % (sol.value, sol.x[0], sol.x[1],
                               sorted(sol.active), sol.pieces_visited))
    print("subset oracle     : value %.9f at (%.6f, %.6f)"
          % (ref.value, ref.x[0], ref.x[1]))
    print("agreement: %.2e" % abs(sol.value - ref.value))


if __name__ == "__main__":
    main()
