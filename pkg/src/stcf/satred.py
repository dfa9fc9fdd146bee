"""3-SAT reduction to a sum of truncated convex functions.

A variable b_k maps to a real x_k with b_k TRUE iff x_k > 0.  For each
clause, seven indicator functions (0 on an open/closed orthant slab
intersection, +inf outside, truncated at 1) encode the seven satisfying
sign patterns of its three literals: pattern t in {1..7} read as three
binary digits left to right, digit j = 1 exactly when literal j is true.
On any x the clause sum is 6 when the induced assignment satisfies the
clause and 7 otherwise, so the formula is satisfiable iff the full sum
attains 6m.  Minimizing over sign patterns is therefore an exact solver
for this family, and an NP-hardness witness for the general problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_ENUM_VARS = 24


@dataclass(frozen=True)
class Formula3Sat:
    """Clauses are triples of nonzero 1-based literals; negative means
    negated.  Each clause must use three distinct variables."""

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("formula needs at least one variable")
        cleaned = []
        for ci, clause in enumerate(self.clauses):
            lits = tuple(int(l) for l in clause)
            if len(lits) != 3:
                raise ValueError("clause %d has %d literals, expected 3" % (ci, len(lits)))
            if any(l == 0 for l in lits):
                raise ValueError("clause %d contains literal 0" % ci)
            if any(abs(l) > self.num_vars for l in lits):
                raise ValueError("clause %d references variable beyond %d"
                                 % (ci, self.num_vars))
            if len({abs(l) for l in lits}) != 3:
                raise ValueError("clause %d repeats a variable" % ci)
            cleaned.append(lits)
        object.__setattr__(self, "clauses", tuple(cleaned))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class HalfSpace:
    """x[var] > 0 when positive, else x[var] <= 0 (0-based var)."""

    var: int
    positive: bool

    def holds(self, x) -> bool:
        return (x[self.var] > 0.0) if self.positive else (x[self.var] <= 0.0)


@dataclass(frozen=True)
class OrthantTerm:
    """min{g, 1} where g is 0 on the half-space intersection, +inf off it."""

    clause: int
    pattern: int
    halfspaces: tuple

    def value(self, x) -> float:
        return 0.0 if all(h.holds(x) for h in self.halfspaces) else 1.0


@dataclass(frozen=True)
class OrthantReduction:
    formula: Formula3Sat
    terms: tuple

    def value_at(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return sum(t.value(x) for t in self.terms)

    @property
    def expected_if_satisfiable(self) -> int:
        return 6 * self.formula.num_clauses


def reduce(formula: Formula3Sat) -> OrthantReduction:
    """Seven truncated indicator terms per clause."""
    terms = []
    for ci, clause in enumerate(formula.clauses):
        for t in range(1, 8):
            hs = []
            for j, lit in enumerate(clause):
                bit = (t >> (2 - j)) & 1  # j-th binary digit of t, left to right
                positive_side = (bit == 1) == (lit > 0)
                hs.append(HalfSpace(abs(lit) - 1, positive_side))
            terms.append(OrthantTerm(ci, t, tuple(hs)))
    return OrthantReduction(formula, tuple(terms))


def _assignment_matrix(n: int) -> np.ndarray:
    rows = np.arange(1 << n, dtype=np.uint32)
    return (rows[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1 == 1


def _clause_sat(formula: Formula3Sat, assign: np.ndarray) -> np.ndarray:
    """(num_assignments, num_clauses) satisfaction table."""
    cols = []
    for clause in formula.clauses:
        sat = np.zeros(assign.shape[0], dtype=bool)
        for lit in clause:
            col = assign[:, abs(lit) - 1]
            sat |= col if lit > 0 else ~col
        cols.append(sat)
    return np.column_stack(cols)


def min_by_orthants(reduction: OrthantReduction):
    """Exact minimum of the reduced sum over all sign patterns.

    Returns (value, assignment) where assignment is the bool vector of
    the minimizing orthant (x_k > 0 iff assignment[k])."""
    formula = reduction.formula
    n = formula.num_vars
    if n > _MAX_ENUM_VARS:
        raise ValueError("orthant enumeration limited to %d variables" % _MAX_ENUM_VARS)
    assign = _assignment_matrix(n)
    sat = _clause_sat(formula, assign)
    totals = 7 * formula.num_clauses - sat.sum(axis=1)
    k = int(np.argmin(totals))
    return int(totals[k]), assign[k].copy()


def satisfiable(formula: Formula3Sat) -> bool:
    """Direct clause-table satisfiability check (the referee)."""
    if formula.num_vars > _MAX_ENUM_VARS:
        raise ValueError("enumeration limited to %d variables" % _MAX_ENUM_VARS)
    assign = _assignment_matrix(formula.num_vars)
    return bool(_clause_sat(formula, assign).all(axis=1).any())


def assignment_point(assignment) -> np.ndarray:
    """A real witness x for a boolean assignment (+1 / -1 coordinates)."""
    a = np.asarray(assignment, dtype=bool)
    return np.where(a, 1.0, -1.0)


def parse_dimacs(text: str) -> Formula3Sat:
    """DIMACS CNF with exactly three distinct-variable literals per clause."""
    num_vars = None
    num_clauses = None
    tokens = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ValueError("line %d: duplicate problem header" % ln)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError("line %d: malformed header %r" % (ln, line))
            try:
                num_vars = int(parts[2])
                num_clauses = int(parts[3])
            except ValueError:
                raise ValueError("line %d: non-integer header fields" % ln) from None
            continue
        if num_vars is None:
            raise ValueError("line %d: clause data before 'p cnf' header" % ln)
        try:
            tokens.extend(int(tok) for tok in line.split())
        except ValueError:
            raise ValueError("line %d: non-integer literal in %r" % (ln, line)) from None
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    clauses = []
    cur = []
    for tok in tokens:
        if tok == 0:
            if cur:
                clauses.append(tuple(cur))
                cur = []
        else:
            cur.append(tok)
    if cur:
        raise ValueError("last clause is not 0-terminated")
    if len(clauses) != num_clauses:
        raise ValueError("header declares %d clauses, found %d"
                         % (num_clauses, len(clauses)))
    return Formula3Sat(num_vars, tuple(clauses))
