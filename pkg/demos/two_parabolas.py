"""Worked 1-D example: two truncated parabolas.

Minimize min{4x^2 + 1, 3} + min{2(x-1)^2 + 2, 4}.  Each term either
stays active (contributes its parabola) or is truncated (contributes
its cap), so the global minimum is the best over the four restricted
convex problems.  The script prints that table, solves the sum with the
sweep solver, and writes the problem/solution JSON files so the run can
be replayed with `stcf solve1d problem.json`.
"""

import argparse
import itertools
import os

import numpy as np

from stcf import Quadratic, TruncatedQuadratic, minimize, minimize_sum_1d
from stcf.problemio import ProblemFile, save_problem, save_solution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="demo_out")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    terms = [
        TruncatedQuadratic(Quadratic(np.array([[8.0]]), np.array([0.0]), 1.0), 3.0),
        TruncatedQuadratic(Quadratic(np.array([[4.0]]), np.array([-4.0]), 4.0), 4.0),
    ]

    print("restricted minima over the four truncation patterns:")
    for keep in itertools.chain.from_iterable(
            itertools.combinations(range(2), k) for k in range(3)):
        total = Quadratic(np.zeros((1, 1)), np.zeros(1), 0.0)
        capped = 0.0
        for i, t in enumerate(terms):
            if i in keep:
                total = total + t.q
            else:
                capped += t.lam
        m = minimize(total)
        print("  active=%-6s min = %.6f + caps %.1f = %.6f"
              % (set(keep) or "{}", m.value, capped, m.value + capped))

    sol = minimize_sum_1d(terms)
    print("sweep solver: value = %.12g at x = %.12g (13/3 at 1/3), active = %s"
          % (sol.value, sol.x[0], sorted(sol.active)))

    prob_path = os.path.join(args.outdir, "two_parabolas.json")
    sol_path = os.path.join(args.outdir, "two_parabolas_solution.json")
    save_problem(prob_path, ProblemFile(dim=1, terms=terms))
    save_solution(sol_path, sol)
    print("wrote %s and %s (replay: stcf solve1d %s)"
          % (prob_path, sol_path, prob_path))


if __name__ == "__main__":
    main()
