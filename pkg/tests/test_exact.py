import random
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from nilwgp.errors import ArityError, DivisionByZeroError, ModeMismatchError
from nilwgp.exact import (RATIONAL, ExactMatrix, FunctionFieldMode, MultiPoly, eval_poly, format_scalar, mode_of,
                          monomials_up_to, nullspace, rank, rational_gcd, rref, scalar_arith, solve_in_span,
                          span_basis)

rationals = st.fractions(max_denominator=50).map(lambda f: mpq(f.numerator, f.denominator))


def test_scalar_examples():
    assert scalar_arith(mpq(1, 3), mpq(1, 6), "+") == mpq(1, 2)
    assert scalar_arith(mpq(2, 3), mpq(3, 2), "*") == 1
    ff = FunctionFieldMode(2)
    t1 = ff.gens[0]
    assert scalar_arith(t1, t1, "/") == ff.field.one


def test_scalar_errors():
    with pytest.raises(DivisionByZeroError):
        scalar_arith(mpq(1), mpq(0), "/")
    t1 = FunctionFieldMode(1).gens[0]
    with pytest.raises(ModeMismatchError):
        scalar_arith(mpq(1), t1, "+")


def test_modes():
    assert mode_of(mpq(3, 4)) is RATIONAL
    ff = FunctionFieldMode(2)
    assert mode_of(ff.gens[1]) == ff.field
    assert format_scalar(mpq(-6, 4)) == "-3/2"


@settings(max_examples=1000, deadline=None)
@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=200, deadline=None)
@given(rationals, rationals)
def test_canonical_form(a, b):
    # equal values have identical reduced numerator/denominator
    assert (a == b) == ((a.numerator, a.denominator) == (b.numerator, b.denominator))
    assert a.denominator > 0


def test_function_field_canonical():
    t1, t2 = FunctionFieldMode(2).gens
    x = (t1 * t2 + t1) / (t2 + 1)
    assert x == t1
    assert str(x) == str(t1)


def test_nullspace_examples():
    assert nullspace(ExactMatrix.identity(3)) == []
    basis = nullspace([[mpq(1), mpq(-1)]])
    assert [b.column_vector() for b in basis] == [(1, 1)]


def test_nullspace_random_against_sympy():
    rng = random.Random(11)
    for _ in range(20):
        rows = [[mpq(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(6)] for _ in range(4)]
        if rng.random() < 0.5:
            rows[3] = [a + 2 * b for a, b in zip(rows[0], rows[1])]
        ref = sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in rows]).rank()
        assert rank(rows) == ref
        basis = nullspace(rows)
        assert len(basis) == 6 - ref
        for v in basis:
            col = v.column_vector()
            assert all(sum(a * b for a, b in zip(r, col)) == 0 for r in rows)


def test_rref_and_span():
    red, piv = rref([[2, 4], [1, 3]])
    assert piv == [0, 1]
    assert red == [[1, 0], [0, 1]]
    rows, piv = span_basis([[1, 1, 0], [2, 2, 0], [0, 0, 0]])
    assert piv == [0] and rows == [[1, 1, 0]]
    assert solve_in_span([[1, 0], [0, 2]], [3, 4]) == [3, 2]
    assert solve_in_span([[1, 1]], [1, 0]) is None


def test_symbolic_rank():
    t1, t2 = FunctionFieldMode(2).gens
    assert rank([[t1, t2], [t1 * t2, t2 * t2]]) == 1
    assert rank([[t1, t2], [t2, t1]]) == 2


def test_matrix_ops():
    A = ExactMatrix.from_rows([[1, 2], [3, 4]])
    B = ExactMatrix.from_rows([[0, 1], [1, 0]])
    assert (A @ B).rows == ((2, 1), (4, 3))
    assert A.transpose().rows == ((1, 3), (2, 4))
    assert (A @ ExactMatrix.identity(2)).rows == A.rows


def test_eval_poly_examples():
    x1, x2, x3 = (MultiPoly.variable(3, i) for i in range(3))
    assert eval_poly(x1 * x2 - x3, [2, 3, 6]) == 0
    assert eval_poly(MultiPoly.variable(1, 0) ** 2, [mpq(1, 2)]) == mpq(1, 4)
    with pytest.raises(ArityError):
        eval_poly(x3, [1, 2])


def test_eval_poly_random_against_sympy():
    rng = random.Random(5)
    xs = sympy.symbols("x1:4")
    for _ in range(30):
        terms = {m: mpq(rng.randint(-9, 9), rng.randint(1, 5)) for m in rng.sample(monomials_up_to(3, 3), 6)}
        p = MultiPoly(3, terms)
        pt = [mpq(rng.randint(-7, 7), rng.randint(1, 6)) for _ in range(3)]
        expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.prod([v ** e for v, e in zip(xs, m)])
                   for m, c in terms.items())
        ref = expr.subs({v: sympy.Rational(int(a.numerator), int(a.denominator)) for v, a in zip(xs, pt)})
        got = eval_poly(p, pt)
        assert Fraction(int(got.numerator), int(got.denominator)) == Fraction(int(ref.p), int(ref.q))


def test_multipoly_invariants():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    p = x1 * x1 * mpq(3, 2) - x2 * 7 + 1
    assert p.degree == 2
    assert p.height == 7
    assert (p - p).is_zero()
    assert 0 not in p.terms.values()
    q = (x1 * mpq(-2, 3) + x2 * mpq(4, 9)).primitive()
    assert q == x1 * 3 - x2 * 2
    assert len(monomials_up_to(2, 2)) == 6
    assert hash(x1 + x2) == hash(x2 + x1)


def test_rational_gcd():
    assert rational_gcd([mpq(1, 2), mpq(3, 4)]) == mpq(1, 4)
    assert rational_gcd([0, 0]) == 0
    assert rational_gcd([6, 9]) == 3
