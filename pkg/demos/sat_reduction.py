"""3-SAT as minimization of a sum of truncated indicators.

Each clause contributes seven orthant terms; a sign assignment
satisfies the clause exactly when it avoids the one falsifying orthant,
so the per-clause sum is 6 when satisfied and 7 otherwise.  The formula
is satisfiable iff the global minimum equals 6m, and the minimizing
orthant decodes to a satisfying assignment.  Writes both formulas in
DIMACS CNF form.
"""

import argparse
import os

from stcf import satred


def show(name, formula):
    red = satred.reduce(formula)
    value, assign = satred.min_by_orthants(red)
    expected = 6 * formula.num_clauses
    verdict = "SAT" if value == expected else "UNSAT"
    print("%s: n=%d m=%d min=%d expected-if-sat=%d -> %s (referee: %s)"
          % (name, formula.num_vars, formula.num_clauses, value, expected,
             verdict, "SAT" if satred.satisfiable(formula) else "UNSAT"))
    if value == expected:
        bits = "".join("T" if b else "F" for b in assign)
        point = satred.assignment_point(assign)
        print("  assignment %s verifies: value_at = %g" % (bits, red.value_at(point)))
    return formula


def dimacs(formula):
    lines = ["c written by the reduction demo",
             "p cnf %d %d" % (formula.num_vars, formula.num_clauses)]
    lines += ["%d %d %d 0" % c for c in formula.clauses]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="demo_out")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    sat = satred.Formula3Sat(4, ((1, -2, 3), (-1, 2, 4), (2, -3, -4)))
    unsat = satred.Formula3Sat(3, tuple(
        (s1 * 1, s2 * 2, s3 * 3)
        for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)))

    for name, formula in (("satisfiable", sat), ("unsatisfiable", unsat)):
        show(name, formula)
        path = os.path.join(args.outdir, "%s.cnf" % name)
        with open(path, "w") as fh:
            fh.write(dimacs(formula))
        print("  wrote %s (replay: stcf satred %s)" % (path, path))


if __name__ == "__main__":
    main()
