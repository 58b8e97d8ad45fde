import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from koszul_bezout.grassmann import (Context, Multivector, contract_left, contract_top, dual_pair,
                                     exp_det, matrix_det, odd, subst_morphism, wedge_mul)
from koszul_bezout.poly import ContextError, VarFamily
from koszul_bezout.sampling import random_multivector

from conftest import ctx_of, mv

F3 = ctx_of(1, 3)


def gens(ctx, name, k):
    return [Multivector.gen(ctx, name, i) for i in range(k)]


# wedge product ---------------------------------------------------------------

def test_anticommutation_and_square_zero():
    f1, f2, _ = gens(F3, "fx", 3)
    assert f1 * f2 == mv("fx^1^fx^2", F3)
    assert f2 * f1 == -(f1 * f2)
    assert not f1 * f1
    assert not (f1 + f2) * (f1 + f2)


def test_context_mismatch_is_reported():
    a = Context((VarFamily("x", 1),))
    b = Context((VarFamily("x", 2),))
    with pytest.raises(ContextError):
        wedge_mul(Multivector.var(a, "x", 0), Multivector.var(b, "x", 1))


def _homog(rng_seed, ctx):
    import random
    r = random.Random(rng_seed)
    m = random_multivector(r, ctx, 2, nterms=3)
    return m.homogeneous_part(min(m.degrees())) if m else Multivector.scalar(1, ctx)


MIXED = Context((VarFamily("x", 2), VarFamily("x*", 2, "x")), (odd("fx", 3), odd("fx", 3).dual(), odd("u", 2)))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_supercommutative_and_associative(s1, s2, s3):
    a, b, c = _homog(s1, MIXED), _homog(s2, MIXED), _homog(s3, MIXED)
    sgn = -1 if (a.degree() * b.degree()) & 1 else 1
    assert a * b == (b * a).scale(sgn)
    assert (a * b) * c == a * (b * c)


# pairing ---------------------------------------------------------------------

def _perm_sign(seq):
    sign, seq = 1, list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def coproduct_pair(dual_word, primal_word):
    """Independent oracle: expand the pairing by splitting off the first primal factor.

    ``a.(c1 c2)`` is computed by writing every dual generator as the sum of
    a primed and a double-primed copy, moving the double-primed factors to
    the left, and pairing primed against ``c1`` and double-primed against ``c2``.
    """
    r = len(dual_word)
    if r != len(primal_word):
        return 0
    if r == 0:
        return 1
    if r == 1:
        return 1 if dual_word[0] == primal_word[0] else 0
    c1, c2 = primal_word[:1], primal_word[1:]
    total = 0
    for pos in range(r):  # the single primed factor pairs with c1
        labels = ["''"] * r
        labels[pos] = "'"
        # reorder to (double-primed ..., primed): sign of moving primed to the end
        order = [i for i in range(r) if labels[i] == "''"] + [pos]
        sign = _perm_sign(order)
        a1 = [dual_word[pos]]
        a2 = [dual_word[i] for i in range(r) if i != pos]
        total += sign * coproduct_pair(a1, c1) * coproduct_pair(a2, c2)
    return total


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_pairing_matches_coproduct_expansion(r):
    ctx = Context((), (odd("fx", 3), odd("fx", 3).dual()))
    for dual_word in itertools.permutations(range(3), r):
        for primal_word in itertools.permutations(range(3), r):
            a = Multivector.scalar(1, ctx)
            for i in dual_word:
                a = a * Multivector.gen(ctx, "fx*", i)
            c = Multivector.scalar(1, ctx)
            for j in primal_word:
                c = c * Multivector.gen(ctx, "fx", j)
            got = contract_top(a * c, ["fx"])
            want = coproduct_pair(dual_word, primal_word)
            assert got == Multivector.scalar(want), (dual_word, primal_word)


def test_pairing_examples():
    d = Context((), (odd("fx", 2).dual(),))
    p = Context((), (odd("fx", 2),))
    assert dual_pair(mv("fx*^1", d), mv("fx^1", p)) == Multivector.scalar(1)
    assert dual_pair(mv("fx*^1", d), mv("fx^2", p)) == Multivector.scalar(0)
    assert dual_pair(mv("fx*^1^fx*^2", d), mv("fx^1^fx^2", p)) == Multivector.scalar(-1)
    assert dual_pair(mv("fx*^1^fx*^2", d), mv("fx^1", p)) == Multivector.scalar(0)


def test_dual_pair_needs_partner():
    d = Context((), (odd("fx", 1).dual(),))
    with pytest.raises(ContextError):
        dual_pair(Multivector.gen(d, "fx*", 0), Multivector.scalar(1))


def test_even_pairing_uses_divided_powers():
    ctx = Context((VarFamily("x", 1), VarFamily("x*", 1, "x")))
    xs = Multivector.var(ctx, "x*", 0)
    # (x_*)^2 = 2 (x^2)_* so it evaluates to 2 on x^2
    assert contract_top(xs * xs * Multivector.var(ctx, "x", 0, 2), ["x"]) == Multivector.scalar(2)
    assert contract_top(Multivector.var(ctx, "x*", 0, 2) * Multivector.var(ctx, "x", 0, 2),
                        ["x"]) == Multivector.scalar(1)


def test_contract_top_examples():
    ctx = Context((), (odd("u", 1), odd("u", 1).dual(), odd("fx", 1)))
    us, u, f = Multivector.gen(ctx, "u*", 0), Multivector.gen(ctx, "u", 0), Multivector.gen(ctx, "fx", 0)
    assert contract_top((-us) * (-u), ["u"]) == Multivector.scalar(1)
    assert not contract_top((-us) * f, ["u"])
    c = f + Multivector.scalar(3, ctx)
    assert contract_top(c, []) == c


def test_contract_left_examples():
    ctx = Context((VarFamily("x", 1), VarFamily("x*", 1, "x")))
    sel = Multivector.var(ctx, "x*", 0)  # (x^1)_*
    x = Multivector.var(ctx, "x", 0)
    assert contract_left(sel * Multivector.scalar(1, ctx), ["x"]).trimmed() == sel.trimmed()
    assert not contract_left(Multivector.zero(ctx) * x, ["x"])
    got = contract_left(sel * x, ["x"])
    # the resulting functional is 1 on the constant monomial and 0 on x, x^2
    one = Context((VarFamily("x", 1),))
    for k, want in ((0, 1), (1, 0), (2, 0)):
        assert dual_pair(got, Multivector.var(one, "x", 0, k)) == Multivector.scalar(want)


# substitution ----------------------------------------------------------------

def test_subst_examples():
    ctx = Context((VarFamily("xp", 1), VarFamily("y", 1)), (odd("fy", 2), odd("up", 1)))
    g = Multivector.var(ctx, "xp", 0) + Multivector.var(ctx, "y", 0)
    img = Multivector.gen(ctx, "fy", 0) + Multivector.gen(ctx, "up", 0) * g
    zc = Context((VarFamily("z", 1),), (odd("fz", 2),))
    assert subst_morphism(Multivector.gen(zc, "fz", 0), {"fz": [img, Multivector.gen(ctx, "fy", 1)]}) == img
    z2 = Multivector.var(zc, "z", 0, 2)
    assert subst_morphism(z2, {"z": [Multivector.var(ctx, "xp", 0)]}) == Multivector.var(ctx, "xp", 0, 2)
    fz12 = mv("fz^1^fz^2", zc)
    out = subst_morphism(fz12, {"fz": gens(ctx, "fy", 2)})
    assert out == Multivector.gen(ctx, "fy", 0) * Multivector.gen(ctx, "fy", 1)


def test_subst_parity_violation():
    zc = Context((VarFamily("z", 1),), (odd("fz", 1),))
    with pytest.raises(ValueError):
        subst_morphism(Multivector.gen(zc, "fz", 0), {"fz": [Multivector.var(zc, "z", 0)]})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_subst_is_multiplicative(s1, s2):
    import random
    r = random.Random(s1)
    zc = Context((VarFamily("z", 2),), (odd("fz", 2),))
    tgt = Context((VarFamily("x", 2),), (odd("fx", 3),))
    a = [random_multivector(r, tgt, 2, 2).homogeneous_part(0) for _ in range(2)]
    b = [random_multivector(r, tgt, 1, 3, fdeg=1) for _ in range(2)]
    r2 = random.Random(s2)
    c, c2 = random_multivector(r2, zc, 2), random_multivector(r2, zc, 2)
    images = {"z": a, "fz": b}
    lhs = subst_morphism(c * c2, images)
    rhs = subst_morphism(c, images) * subst_morphism(c2, images)
    assert lhs.trimmed() == rhs.trimmed()


# exponential determinant -------------------------------------------------------

def test_exp_det_examples():
    assert exp_det([], []) == Multivector.scalar(1)
    ctx = Context((VarFamily("x", 1), VarFamily("y", 1)), (odd("fx", 1), odd("fy", 1), odd("u", 1), odd("u", 1).dual()))
    g = Multivector.var(ctx, "x", 0) + Multivector.var(ctx, "y", 0)
    top = [-Multivector.gen(ctx, "u*", 0)]
    bottom = [Multivector.gen(ctx, "fx", 0) - Multivector.gen(ctx, "fy", 0) - Multivector.gen(ctx, "u", 0) * g]
    assert exp_det(top, bottom, aux="u").trimmed() == g.trimmed()
    assert matrix_det([[Fraction(7, 2)]]) == Multivector.scalar(Fraction(7, 2))


def test_exp_det_aux_collision():
    ctx = Context((), (odd("p", 1),))
    with pytest.raises(ContextError):
        exp_det([], [(Multivector.gen(ctx, "p", 0), [1])], aux="p")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_matrix_det_matches_cofactor_expansion(m):
    import random
    r = random.Random(m)
    ctx = Context((VarFamily("x", 2),))
    xs = sympy.symbols("a b")
    for _ in range(4):
        rows, srows = [], []
        for _ in range(m):
            row, srow = [], []
            for _ in range(m):
                c0, c1, c2 = (r.randint(-3, 3) for _ in range(3))
                row.append(Multivector.scalar(c0, ctx) + Multivector.var(ctx, "x", 0).scale(c1)
                           + Multivector.var(ctx, "x", 1).scale(c2))
                srow.append(c0 + c1 * xs[0] + c2 * xs[1])
            rows.append(row)
            srows.append(srow)
        got = matrix_det(rows)
        want = sympy.Poly(sympy.Matrix(srows).det(method="berkowitz"), *xs)
        expect = Multivector.zero(ctx)
        for exps, c in want.terms():
            expect = expect + Multivector.monomial(ctx, {"x": exps}).scale(Fraction(int(c.p), int(c.q)))
        assert got.trimmed() == expect.trimmed()
