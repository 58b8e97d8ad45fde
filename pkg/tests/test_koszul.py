import random

import pytest
from hypothesis import given, settings, strategies as st

from koszul_bezout.grassmann import Context, Multivector, dual_pair, odd
from koszul_bezout.homology import basis_enumerate, dual_context
from koszul_bezout.koszul import (Complex, ComplexMap, UnassignedGeneratorError, boundary,
                                  dual_basis_element, is_cycle)
from koszul_bezout.poly import VarFamily
from koszul_bezout.sampling import random_multivector, random_polynomial

from conftest import ctx_of, mv


def koszul_1d(f_texts):
    ctx = ctx_of(1, len(f_texts))
    xctx = Context((VarFamily("x", 1),))
    vals = [mv(t, xctx) for t in f_texts]
    return ctx, {"fx": vals}


def test_boundary_examples():
    ctx, asg = koszul_1d(["x^2", "x+1"])
    assert boundary(mv("fx^1", ctx), asg) == mv("x^2", ctx)
    got = boundary(mv("fx^1^fx^2", ctx), asg)
    assert got == mv("x^2*fx^2 - x*fx^1 - fx^1", ctx)
    assert not boundary(got, asg)


def test_unassigned_generator():
    ctx = ctx_of(1, 2, odds=("fx", "g"))
    with pytest.raises(UnassignedGeneratorError):
        boundary(mv("g^1", ctx), {"fx": [mv("x", Context((VarFamily("x", 1),)))] * 2})


def test_is_cycle_examples():
    ctx, asg = koszul_1d(["x^2", "x+1"])
    assert is_cycle(mv("x^2*fx^2 - x*fx^1 - fx^1", ctx), asg)
    assert not is_cycle(mv("fx^1", ctx), asg)
    assert is_cycle(Multivector.scalar(1, ctx), asg)


def mixed_complex(r, n, s):
    """Context (x, y, fx, fy, u) with u -> x - y and random f."""
    ctx = Context((VarFamily("x", n), VarFamily("y", n)), (odd("fx", s), odd("fy", s), odd("u", n)))
    fs = [random_polynomial(r, n, 3) for _ in range(s)]
    xc = Context((VarFamily("x", n),))
    yc = Context((VarFamily("y", n),))
    fx = [Multivector(xc, {(e, ()): c for e, c in p.terms.items()}) for p in fs]
    fy = [Multivector(yc, {(e, ()): c for e, c in p.terms.items()}) for p in fs]
    u = [Multivector.var(ctx, "x", k) - Multivector.var(ctx, "y", k) for k in range(n)]
    return ctx, {"fx": fx, "fy": fy, "u": u}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_boundary_squares_to_zero(seed, n, s):
    r = random.Random(seed)
    ctx, asg = mixed_complex(r, n, s)
    c = random_multivector(r, ctx, 3, nterms=4)
    assert not boundary(boundary(c, asg), asg)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_graded_leibniz(seed, n, s):
    r = random.Random(seed)
    ctx, asg = mixed_complex(r, n, s)
    a = random_multivector(r, ctx, 2, nterms=3)
    if a:
        a = a.homogeneous_part(min(a.degrees()))
    b = random_multivector(r, ctx, 2, nterms=3)
    sgn = -1 if a and a.degree() & 1 else 1
    assert boundary(a * b, asg) == boundary(a, asg) * b + (a * boundary(b, asg)).scale(sgn)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 3))
def test_dual_boundary_is_signed_adjoint(seed, n, s):
    # oracle: (d a).c = -(-1)^|a| a.(d c) on every basis monomial c
    r = random.Random(seed)
    ctx = ctx_of(n, s)
    xc = Context((VarFamily("x", n),))
    asg = {"fx": [Multivector(xc, {(e, ()): c for e, c in random_polynomial(r, n, 2).terms.items()})
                  for _ in range(s)]}
    dctx = dual_context(ctx)
    a = random_multivector(r, dctx, 4, nterms=4)
    if not a:
        return
    a = a.homogeneous_part(min(a.degrees()))
    da = boundary(a, asg)
    sgn = 1 if a.degree() & 1 else -1
    for fdeg in range(0, s + 1):
        for c in basis_enumerate(ctx, fdeg, 6):
            lhs = dual_pair(da, c) if da else Multivector.scalar(0)
            rhs = dual_pair(a, boundary(c, asg)).scale(sgn) if boundary(c, asg) else Multivector.scalar(0)
            assert lhs.trimmed() == rhs.trimmed()


def test_dual_boundary_example():
    ctx, asg = koszul_1d(["x^2"])
    d = dual_context(ctx)
    assert boundary(mv("(x^2)_*", d), asg) == mv("-(1)_* fx*^1", d)
    assert not boundary(mv("(x^1)_*", d), asg)


def test_dual_basis_element_pairs_to_one():
    ctx = ctx_of(2, 3)
    for fdeg in range(4):
        for b in basis_enumerate(ctx, fdeg, 2):
            b3 = b.scale(3)
            assert dual_pair(dual_basis_element(b3), b3) == Multivector.scalar(1)


# complex maps --------------------------------------------------------------

def _complex(seed, n=1, s=2):
    r = random.Random(seed)
    ctx = ctx_of(n, s)
    xc = Context((VarFamily("x", n),))
    vals = [Multivector(xc, {(e, ()): c for e, c in random_polynomial(r, n, 2).terms.items()}) for _ in range(s)]
    return Complex(ctx, {"fx": vals}), r


def _random_map(cx, r, degree, D=1):
    basis = [b for k in range(cx.ctx.nodd + 1) for b in basis_enumerate(cx.ctx, k, D)]
    pairs = []
    for b in basis:
        tdeg = b.degree() + degree
        if 0 <= tdeg <= cx.ctx.nodd:
            img = random_multivector(r, cx.ctx, 2, nterms=2, fdeg=tdeg)
            pairs.append((b, img))
    return ComplexMap.from_images(cx, cx, degree, pairs), basis


def test_identity_is_a_cycle():
    cx, _ = _complex(1)
    basis = [b for k in range(3) for b in basis_enumerate(cx.ctx, k, 2)]
    ident = ComplexMap.identity(cx, basis)
    for b in basis:
        assert ident(b) == b
    # d[id] vanishes wherever d b stays inside the span
    inner = [b for b in basis if b.poly_degree() == 0]
    assert ident.boundary().is_zero_on([b for b in inner if not b.degree()])


@pytest.mark.parametrize("seed", range(5))
def test_hom_boundary_squares_to_zero(seed):
    cx, r = _complex(seed)
    a, basis = _random_map(cx, r, 1)
    dd = a.boundary().boundary()
    assert dd.is_zero_on(basis)
    # element form and lazy form of the boundary agree
    lazy = ComplexMap(cx, cx, 1, func=a.apply).boundary()
    for b in basis:
        assert a.boundary()(b) == lazy(b)


@pytest.mark.parametrize("seed", range(5))
def test_composition_leibniz(seed):
    cx, r = _complex(seed)
    a, basis = _random_map(cx, r, 1)
    b, _ = _random_map(cx, r, 0)
    ab = a.compose(b)
    sgn = -1 if a.degree & 1 else 1
    lhs = ab.boundary()
    rhs1 = a.boundary().compose(b)
    rhs2 = a.compose(b.boundary())
    for c in basis:
        assert lhs(c) == rhs1(c) + rhs2(c).scale(sgn)


def test_compose_unit_and_zero():
    cx, r = _complex(3)
    b, basis = _random_map(cx, r, 0)
    ident = ComplexMap.identity(cx, [x for k in range(3) for x in basis_enumerate(cx.ctx, k, 4)])
    zero = ComplexMap.from_images(cx, cx, 0, [])
    for c in basis:
        assert ident.compose(b)(c) == b(c)
        assert not b.compose(zero)(c)


def test_compose_of_cycles_is_cycle():
    # multiplication by a cycle commutes with d, so it is a cycle of the Hom complex
    cx, _ = _complex(4)
    z = boundary(mv("fx^1^fx^2", cx.ctx), cx.asg)
    assert is_cycle(z, cx.asg)
    mult = ComplexMap(cx, cx, 1, func=lambda c: z * c)
    mult2 = ComplexMap(cx, cx, 0, func=lambda c: mv("x", cx.ctx) * c)
    basis = [b for k in range(3) for b in basis_enumerate(cx.ctx, k, 2)]
    assert mult.boundary().is_zero_on(basis)
    assert mult.compose(mult2).boundary().is_zero_on(basis)
