import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from koszul_bezout import linalg
from koszul_bezout.bezout import PolySystem, j_map, left_action
from koszul_bezout.grassmann import Multivector
from koszul_bezout.homology import (NotACycleError, TruncatedComplex, basis_enumerate, boundary_matrix,
                                    certify_dual_boundary, extend_dual_cycle,
                                    find_unit_preimage, homology_rank,
                                    homotopy_inverse_check, max_weight, quotient_dimension,
                                    solve_boundary_membership, weight_of)
from koszul_bezout.koszul import boundary
from koszul_bezout.sampling import random_system

from conftest import ctx_of, functional, mv, standard_monomial_count, system

SQUARE = "vars x; f1 = x^2"
PAIR = "vars x1 x2; f1 = x1^2 - 1; f2 = x2^2 - 1"


def dense(cols, rows):
    return sympy.Matrix([[sympy.Rational(str(c.get(r, 0))) for c in cols] for r in rows]) \
        if cols and rows else sympy.zeros(len(rows), len(cols))


# linear algebra --------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_linalg_against_sympy(cols_raw, b_raw):
    cols = [{i: Fraction(v) for i, v in enumerate(c) if v} for c in cols_raw]
    A = sympy.Matrix(cols_raw).T
    assert linalg.rank(cols) == A.rank()
    for vec in linalg.nullspace(cols):
        assert not linalg.apply(cols, vec)
    assert len(linalg.nullspace(cols)) == len(cols) - A.rank()
    b = {i: Fraction(v) for i, v in enumerate(b_raw) if v}
    sol = linalg.solve(cols, b)
    solvable = A.rank() == A.row_join(sympy.Matrix(b_raw)).rank()
    assert (sol is not None) == solvable
    if sol is not None:
        assert linalg.apply(cols, sol) == b


def test_solve_is_deterministic():
    cols = [{0: Fraction(2), 1: Fraction(1)}, {0: Fraction(4), 1: Fraction(2)}, {1: Fraction(3)}]
    b = {0: Fraction(2), 1: Fraction(4)}
    assert linalg.solve(cols, b) == linalg.solve(cols, b) == {0: Fraction(1), 2: Fraction(1)}


# bases and matrices --------------------------------------------------------------

def test_basis_examples():
    ctx = ctx_of(1, 1)
    assert basis_enumerate(ctx, 1, 1) == [mv("fx^1", ctx), mv("x*fx^1", ctx)]
    assert basis_enumerate(ctx, 2, 3) == []
    ctx2 = ctx_of(1, 2)
    assert basis_enumerate(ctx2, 2, 0) == [mv("fx^1^fx^2", ctx2)]


def test_basis_counts():
    from math import comb
    ctx = ctx_of(2, 3)
    for fdeg, D in itertools.product(range(4), range(4)):
        assert len(basis_enumerate(ctx, fdeg, D)) == comb(3, fdeg) * comb(D + 2, 2)


def test_boundary_matrix_examples():
    sys = system("vars x; f1 = x")
    cx = sys.koszul()
    bm = boundary_matrix(cx.ctx, cx.asg, 1, 0)
    assert bm.domain == [((0,), (0,))]
    assert bm.columns == [{((1,), ()): 1}]
    zero = PolySystem.from_terms(1, [{}])
    zc = zero.koszul()
    assert boundary_matrix(zc.ctx, zc.asg, 1, 2).is_zero()


@pytest.mark.parametrize("text", [SQUARE, PAIR, "vars x1 x2; f1 = x1*x2; f2 = x1 + x2; f3 = x1"])
def test_boundary_matrices_compose_to_zero(text):
    sys = system(text)
    cx = sys.koszul()
    pad = max(sys.degrees)
    for k in range(1, sys.s):
        outer = boundary_matrix(cx.ctx, cx.asg, k, 2 + pad)
        inner = boundary_matrix(cx.ctx, cx.asg, k + 1, 2)
        assert (outer @ inner).is_zero()
        w1 = boundary_matrix(cx.ctx, cx.asg, k, 3, weighted=True)
        w2 = boundary_matrix(cx.ctx, cx.asg, k + 1, 3, weighted=True)
        assert (w1 @ w2).is_zero()


def test_weighted_truncation_is_subcomplex():
    sys = system("vars x1 x2; f1 = x1^2 + x2; f2 = x1*x2^2 - 1")
    for dual in (False, True):
        tc = TruncatedComplex(sys.koszul().ctx, sys.koszul().asg, 4, dual=dual)
        for k in tc.fdegs:
            for key in tc.basis(k):
                img = boundary(tc.element(key), tc.asg)
                if not dual:
                    assert max_weight(img.trimmed().to(tc.ctx), tc.weights) <= 4


# membership certificates ----------------------------------------------------------

def test_membership_examples():
    sys = system(SQUARE)
    cx = sys.koszul()
    cert = solve_boundary_membership(mv("x^2", cx.ctx), cx.asg, 2)
    assert cert.found and cert.preimage == mv("fx^1", cx.ctx)
    for D in range(0, 6):
        refusal = solve_boundary_membership(mv("1", cx.ctx), cx.asg, D, ctx=cx.ctx)
        assert not refusal.found and "degree" in refusal.reason
    with pytest.raises(NotACycleError):
        solve_boundary_membership(mv("fx^1", cx.ctx), cx.asg, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_certificates_reverify(seed):
    r = random.Random(seed)
    n = r.randint(1, 2)
    sys = random_system(r, n, r.randint(1, 3), 2)
    cx = sys.koszul()
    tc = TruncatedComplex(cx.ctx, cx.asg, 3)
    k = r.randint(1, sys.s)
    keys = tc.basis(k)
    xi = tc.combine(keys, {j: Fraction(r.randint(-2, 2)) for j in range(len(keys))})
    z = boundary(xi, cx.asg)
    cert = solve_boundary_membership(z, cx.asg, 3, ctx=cx.ctx)
    assert cert.found
    assert boundary(cert.preimage, cx.asg).trimmed() == z.trimmed()


# dimensions ----------------------------------------------------------------------

@pytest.mark.parametrize("text,expect", [("vars x; f1 = x", 1), (SQUARE, 2), (PAIR, 4),
                                         ("vars x1 x2 x3; f1 = x1; f2 = x2; f3 = x3", 1)])
def test_quotient_dimension_examples(text, expect):
    sys = system(text)
    dim, stable = quotient_dimension(sys)
    assert (dim, stable) == (expect, True)
    assert dim == standard_monomial_count(sys)


def test_generic_square_systems_reach_bezout_number():
    # dense random coefficients; the oracle confirms no roots escape to infinity
    r = random.Random(42)
    for degs in ((2, 2), (2, 3), (1, 2)):
        for _ in range(20):
            polys = [{e: Fraction(r.choice([-3, -2, -1, 1, 2, 3]))
                      for e in itertools.product(range(d + 1), repeat=2) if sum(e) <= d} for d in degs]
            sys = PolySystem.from_terms(2, polys)
            if standard_monomial_count(sys) == degs[0] * degs[1]:
                break
        else:
            pytest.fail("no generic system drawn")
        dim, stable = quotient_dimension(sys)
        assert stable and dim == degs[0] * degs[1]


def test_quotient_dimension_nonincreasing_past_max_degree():
    sys = system(PAIR)
    dims = [quotient_dimension(sys, D)[0] for D in range(2, 7)]
    assert dims == sorted(dims, reverse=True)


@pytest.mark.parametrize("text,fdeg,expect", [(PAIR, 0, 4), ("vars x1 x2 x3; f1 = x1; f2 = x2; f3 = x3", 0, 1),
                                              ("vars x1 x2; f1 = x1; f2 = x2; f3 = x1 + x2", 0, 1),
                                              (PAIR, 1, 0), (SQUARE, -1, 0), (SQUARE, 0, 2)])
def test_homology_rank_examples(text, fdeg, expect):
    sys = system(text)
    assert homology_rank(sys, fdeg, dual=False)[0] == expect if fdeg >= 0 else homology_rank(sys, fdeg)[0] == expect


@pytest.mark.parametrize("text", [PAIR, "vars x1 x2; f1 = x1; f2 = x2; f3 = x1 + x2", SQUARE])
def test_homology_rank_matches_sympy_ranks(text):
    sys = system(text)
    cx = sys.koszul()
    for dual in (False, True):
        D = sys.default_degree()
        tc = TruncatedComplex(cx.ctx, cx.asg, D, dual=dual)
        for k in tc.fdegs:
            cols = tc.columns(k)
            rows = tc.basis(k - 1) if (k - 1) in tc.fdegs else []
            rk = dense(cols, rows).rank() if rows else 0
            nxt = 0
            if (k + 1) in tc.fdegs:
                nxt = dense(tc.columns(k + 1), tc.basis(k)).rank()
            assert tc.homology_rank(k) == len(cols) - rk - nxt


# unit preimage and the homotopy inverse -------------------------------------------

def test_unit_preimage_examples():
    sys = system(SQUARE)
    up = find_unit_preimage(sys)
    assert up.e == functional(sys, "(x^1)_*") and not up.t
    sys = system("vars x; f1 = x")
    up = find_unit_preimage(sys)
    assert up.e == functional(sys, "(1)_*")
    sys = system("vars x; f1 = x^2 - 1")
    up = find_unit_preimage(sys, 2)
    assert up.found
    allowed = {functional(sys, "(1)_*").sorted_terms()[0][0], functional(sys, "(x^1)_*").sorted_terms()[0][0]}
    assert set(up.e.terms) <= allowed
    cx = sys.koszul()
    assert (j_map(sys, up.e) - boundary(up.t, cx.asg)).trimmed() == Multivector.scalar(1)


def test_unit_preimage_refusal():
    up = find_unit_preimage(system(SQUARE), 0)
    assert not up.found and "raise D" in up.reason
    up = find_unit_preimage(system("vars x1 x2; f1 = x1*x2"))
    assert not up.found


def test_extend_dual_cycle():
    sys = system(PAIR)
    up = find_unit_preimage(sys)
    ext = extend_dual_cycle(sys, up.e, up.D, up.D + 3)
    tc = TruncatedComplex(sys.koszul().ctx, sys.koszul().asg, up.D + 3, dual=True)
    assert not tc.d(ext)
    low = {k: v for k, v in ext.terms.items() if weight_of(k, tc.weights) <= up.D}
    assert low == dict(up.e.to(tc.ctx).terms)


def test_homotopy_inverse_examples():
    sys = system(SQUARE)
    up = find_unit_preimage(sys)
    cx = sys.koszul()
    one = mv("1", cx.ctx)
    z = one - j_map(sys, left_action(up.e, one))
    cert = solve_boundary_membership(z, cx.asg, 2, ctx=cx.ctx)
    assert cert.found and boundary(cert.preimage, cx.asg).trimmed() == (-boundary(up.t, cx.asg)).trimmed()
    e_ext = extend_dual_cycle(sys, up.e, up.D, up.D + 2)
    z4 = up.e - left_action(e_ext, j_map(sys, up.e))
    assert certify_dual_boundary(sys, z4, up.D).found
    zero = Multivector.zero(cx.ctx)
    assert solve_boundary_membership(zero, cx.asg, 2, ctx=cx.ctx).found


@pytest.mark.parametrize("text", [SQUARE, "vars x; f1 = x^2 - 1", PAIR])
def test_homotopy_inverse_report(text):
    sys = system(text)
    up = find_unit_preimage(sys)
    rep = homotopy_inverse_check(sys, up.e, up.t)
    assert rep.passed
    assert all(total >= 10 for _, total in rep.counts().values())
