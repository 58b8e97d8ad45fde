from fractions import Fraction
import itertools

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from koszul_bezout.poly import (ContextError, NotDivisibleError, Polynomial, VarFamily,
                                as_fraction, divexact_linear, divided_difference, poly_mul,
                                poly_subst)

X1 = (VarFamily("x", 1),)
XY1 = (VarFamily("x", 1), VarFamily("y", 1))
XY2 = (VarFamily("x", 2), VarFamily("y", 2))


def P(ctx, terms):
    return Polynomial(ctx, terms)


def to_sympy(p: Polynomial, syms):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** e for s, e in zip(syms, exps)])
               for exps, c in p.terms.items())


coef = st.integers(-4, 4).map(Fraction)


def polys(nv, maxdeg=3, ctx=None):
    exps = st.tuples(*[st.integers(0, maxdeg)] * nv)
    return st.dictionaries(exps, coef, max_size=5).map(lambda t: Polynomial(ctx, t))


def test_zero_coefficients_are_dropped():
    p = P(X1, {(1,): 0, (0,): Fraction(2, 4)})
    assert p.terms == {(0,): Fraction(1, 2)}
    assert not P(X1, {(3,): 0})


def test_rational_lowest_terms():
    c = as_fraction(Fraction(6, -4))
    assert (c.numerator, c.denominator) == (-3, 2)
    assert as_fraction(0) == Fraction(0, 1)


def test_mul_examples():
    x = Polynomial.var(X1, "x", 0)
    assert poly_mul(x + 1, x - 1) == x * x - 1
    assert poly_mul(x + 1, Polynomial.zero(X1)) == Polynomial.zero(X1)
    x1, y1 = Polynomial.var(XY1, "x", 0), Polynomial.var(XY1, "y", 0)
    assert (x1 + y1) * (x1 - y1) == x1 ** 2 - y1 ** 2


def test_mul_context_mismatch():
    with pytest.raises(ContextError):
        poly_mul(Polynomial.var(X1, "x", 0), Polynomial.var(XY1, "y", 0))


def test_subst_examples():
    y = Polynomial.var(XY1, "y", 0)
    xs = Polynomial.var(X1, "x", 0)
    assert poly_subst(xs ** 2, [y]) == y ** 2
    x2, y1 = Polynomial.var(XY2, "x", 1), Polynomial.var(XY2, "y", 0)
    p = P((VarFamily("x", 2),), {(1, 1): 1})
    assert poly_subst(p, {("x", 0): y1, ("x", 1): x2}) == y1 * x2
    assert poly_subst(xs + 1, [xs - 1]) == xs


def test_subst_missing_entry():
    p = P((VarFamily("x", 2),), {(1, 1): 1})
    with pytest.raises(KeyError):
        poly_subst(p, {("x", 0): Polynomial.var(XY2, "y", 0)})


def test_divexact_examples():
    x, y = Polynomial.var(XY1, "x", 0), Polynomial.var(XY1, "y", 0)
    assert divexact_linear(x ** 2 - y ** 2, ("x", 0), ("y", 0)) == x + y
    assert divexact_linear(x ** 3 - y ** 3, ("x", 0), ("y", 0)) == x ** 2 + x * y + y ** 2
    x1, x2, y1 = (Polynomial.var(XY2, "x", 0), Polynomial.var(XY2, "x", 1), Polynomial.var(XY2, "y", 0))
    assert divexact_linear(x1 * x2 - y1 * x2, ("x", 0), ("y", 0)) == x2


def test_divexact_refuses_remainder():
    x, y = Polynomial.var(XY1, "x", 0), Polynomial.var(XY1, "y", 0)
    with pytest.raises(NotDivisibleError):
        divexact_linear(x ** 2 + y, ("x", 0), ("y", 0))


def test_divided_difference_examples():
    x = Polynomial.var(X1, "x", 0)
    (d,) = divided_difference(x ** 2)
    assert d == Polynomial.var(d.context, "x", 0) + Polynomial.var(d.context, "y", 0)
    X2 = (VarFamily("x", 2),)
    d1, d2 = divided_difference(P(X2, {(1, 1): 1}), (0, 1))
    assert d1 == Polynomial.var(d1.context, "x", 1)
    assert d2 == Polynomial.var(d2.context, "y", 0)
    assert all(not d for d in divided_difference(P(X2, {(0, 0): 5})))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_divided_differences_match_sympy_quotients(data):
    # independent oracle: sympy exact division of the two substitutions
    n = data.draw(st.integers(1, 3))
    ctx = (VarFamily("x", n),)
    f = data.draw(polys(n, 3, ctx))
    order = data.draw(st.permutations(range(n)))
    xs, ys = sympy.symbols(f"x0:{n}"), sympy.symbols(f"y0:{n}")
    fs = sympy.S(to_sympy(f, xs))
    comps = divided_difference(f, order)
    done = set()
    for k in order:
        before = {xs[j]: ys[j] for j in done}
        after = dict(before)
        after[xs[k]] = ys[k]
        q, r = sympy.div(sympy.expand(fs.subs(before, simultaneous=True) - fs.subs(after, simultaneous=True)),
                         xs[k] - ys[k], *xs, *ys)
        assert r == 0
        mine = to_sympy(comps[k], list(xs) + list(ys))
        assert sympy.expand(mine - q) == 0
        done.add(k)


@settings(max_examples=60, deadline=None)
@given(polys(2, 3, XY1), polys(2, 3, XY1), polys(2, 3, XY1))
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b == b + a


@settings(max_examples=60, deadline=None)
@given(polys(2, 3, XY1))
def test_divexact_inverts_multiplication(q):
    x, y = Polynomial.var(XY1, "x", 0), Polynomial.var(XY1, "y", 0)
    assert divexact_linear(q * (x - y), ("x", 0), ("y", 0)) == q


def test_evaluate_against_sympy():
    ctx = (VarFamily("x", 2),)
    p = P(ctx, {(2, 1): Fraction(3, 2), (0, 3): -1, (0, 0): 7})
    s = sympy.symbols("a b")
    for pt in itertools.product([-2, 0, Fraction(1, 3)], repeat=2):
        want = to_sympy(p, s).subs({s[0]: sympy.Rational(str(pt[0])), s[1]: sympy.Rational(str(pt[1]))})
        assert p.evaluate(pt) == Fraction(str(want))


def test_canonical_term_order_is_grlex():
    p = P((VarFamily("x", 2),), {(0, 1): 1, (2, 0): 1, (1, 1): 1, (0, 0): 1})
    assert [e for e, _ in p.sorted_terms()] == [(2, 0), (1, 1), (0, 1), (0, 0)]
