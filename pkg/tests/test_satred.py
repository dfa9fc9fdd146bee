import numpy as np
import pytest

from stcf.satred import (Formula3Sat, assignment_point, min_by_orthants,
                         parse_dimacs, reduce, satisfiable)


def brute_force_sat(formula):
    n = formula.num_vars
    for bits in range(1 << n):
        assign = [(bits >> k) & 1 == 1 for k in range(n)]
        ok = True
        for clause in formula.clauses:
            if not any(assign[abs(l) - 1] == (l > 0) for l in clause):
                ok = False
                break
        if ok:
            return True
    return False


def test_formula_validation():
    Formula3Sat(3, ((1, -2, 3),))
    with pytest.raises(ValueError):
        Formula3Sat(3, ((1, 2),))            # two literals
    with pytest.raises(ValueError):
        Formula3Sat(3, ((1, 0, 2),))         # literal 0
    with pytest.raises(ValueError):
        Formula3Sat(3, ((1, 2, 4),))         # out of range
    with pytest.raises(ValueError):
        Formula3Sat(3, ((1, -1, 2),))        # repeated variable
    with pytest.raises(ValueError):
        Formula3Sat(0, ())


def test_seven_terms_per_clause_and_digit_rule():
    formula = Formula3Sat(3, ((1, -2, 3),))
    red = reduce(formula)
    assert len(red.terms) == 7
    assert sorted(t.pattern for t in red.terms) == list(range(1, 8))
    # pattern 0b101: literals 1 and 3 true, literal 2 false.
    # lit 1 = +1 true  -> x_0 > 0; lit 2 = -2 false -> x_1 > 0;
    # lit 3 = +3 true  -> x_2 > 0.
    term = next(t for t in red.terms if t.pattern == 0b101)
    sides = {h.var: h.positive for h in term.halfspaces}
    assert sides == {0: True, 1: True, 2: True}
    # pattern 0b010: only literal 2 (= not b_1) is true -> x_1 <= 0
    term = next(t for t in red.terms if t.pattern == 0b010)
    sides = {h.var: h.positive for h in term.halfspaces}
    assert sides == {0: False, 1: False, 2: False}


def test_clause_sum_is_six_or_seven():
    formula = Formula3Sat(3, ((1, 2, 3),))
    red = reduce(formula)
    # satisfying assignment: exactly one of the 7 orthant terms is free
    assert red.value_at([1.0, -1.0, -1.0]) == 6.0
    # falsifying assignment (all literals false): every term charges 1
    assert red.value_at([-1.0, -1.0, -1.0]) == 7.0
    assert red.expected_if_satisfiable == 6


def test_known_satisfiable_formula():
    formula = Formula3Sat(4, ((1, 2, 3), (-1, -2, 4), (2, -3, -4)))
    red = reduce(formula)
    value, assign = min_by_orthants(red)
    assert value == red.expected_if_satisfiable == 18
    assert satisfiable(formula)
    # the reported assignment really attains the minimum
    assert red.value_at(assignment_point(assign)) == value


def test_known_unsatisfiable_formula():
    # all 8 clauses over 3 variables: no assignment satisfies every one
    clauses = []
    for bits in range(8):
        clauses.append(tuple((1 if (bits >> j) & 1 else -1) * (j + 1)
                             for j in range(3)))
    formula = Formula3Sat(3, tuple(clauses))
    assert not satisfiable(formula)
    value, _ = min_by_orthants(reduce(formula))
    # exactly one clause fails in each orthant: minimum is 6m + 1
    assert value == 6 * 8 + 1


def test_boundary_points_count_as_negative():
    # x_k = 0 means b_k FALSE: the closed side belongs to the negation
    formula = Formula3Sat(3, ((-1, -2, -3),))
    red = reduce(formula)
    assert red.value_at([0.0, 0.0, 0.0]) == 6.0


def test_random_formulas_agree_with_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(40):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(1, 15))
        clauses = []
        for _c in range(m):
            vs = rng.choice(n, size=3, replace=False) + 1
            signs = rng.choice([-1, 1], size=3)
            clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
        formula = Formula3Sat(n, tuple(clauses))
        red = reduce(formula)
        value, assign = min_by_orthants(red)
        sat = brute_force_sat(formula)
        assert (value == red.expected_if_satisfiable) == sat
        assert satisfiable(formula) == sat
        assert red.value_at(assignment_point(assign)) == value


def test_parse_dimacs_roundtrip():
    text = """c example formula
p cnf 4 3
1 2 3 0
-1 -2 4 0
2 -3 -4 0
"""
    formula = parse_dimacs(text)
    assert formula.num_vars == 4
    assert formula.clauses == ((1, 2, 3), (-1, -2, 4), (2, -3, -4))


def test_parse_dimacs_multiline_and_percent_comment():
    text = "p cnf 3 1\n1 -2\n3 0\n%\n"
    formula = parse_dimacs(text)
    assert formula.clauses == ((1, -2, 3),)


def test_parse_dimacs_errors():
    with pytest.raises(ValueError, match="header"):
        parse_dimacs("1 2 3 0\n")
    with pytest.raises(ValueError, match="missing"):
        parse_dimacs("c nothing here\n")
    with pytest.raises(ValueError, match="duplicate"):
        parse_dimacs("p cnf 3 1\np cnf 3 1\n1 2 3 0\n")
    with pytest.raises(ValueError, match="declares"):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n")
    with pytest.raises(ValueError, match="0-terminated"):
        parse_dimacs("p cnf 3 1\n1 2 3\n")
    with pytest.raises(ValueError, match="non-integer"):
        parse_dimacs("p cnf 3 1\n1 x 3 0\n")


def test_enumeration_cap():
    formula = Formula3Sat(30, ((1, 2, 3),))
    with pytest.raises(ValueError):
        satisfiable(formula)
    with pytest.raises(ValueError):
        min_by_orthants(reduce(formula))
