"""Seeded identity suite behind ``koszul-bezout verify``."""
from __future__ import annotations

import random
import warnings

from .bezout import (FX, FZ, X, Y, Z, CheckResult, DegenerateSystemWarning, PolySystem,
                     full_delta, jacobian_is_cycle, jacobian_order_independence,
                     j_map_skewlinearity_check, jmap_morphism_check, main_theorem_check,
                     nabla_map)
from .grassmann import Context, Multivector, OddFamily
from .koszul import boundary
from .poly import VarFamily
from .sampling import random_multivector, random_system


def telescoping_check(sys: PolySystem, order=None) -> CheckResult:
    """``f_i(x) - f_i(y) == sum_k (x_k - y_k) nabla^k f_i`` for every i."""
    nab = sys.nabla(order)
    ctx = Context((VarFamily(X, sys.n), VarFamily(Y, sys.n)))
    lhs = rhs = Multivector.zero(ctx)
    ok = True
    for i, p in enumerate(sys.f):
        li = sys.poly_in(p, X) - sys.poly_in(p, Y)
        ri = Multivector.zero(ctx)
        for k in range(sys.n):
            diff = Multivector.var(ctx, X, k) - Multivector.var(ctx, Y, k)
            ri = ri + diff * nab[i][k]
        ok = ok and li == ri
        lhs, rhs = lhs + li, rhs + ri
    return CheckResult("telescoping", ok, lhs=lhs, rhs=rhs)


def boundary_square_check(c: Multivector, asg) -> CheckResult:
    dd = boundary(boundary(c, asg), asg)
    return CheckResult("boundary_squared", not dd, lhs=dd, rhs=Multivector.zero(dd.ctx))


def leibniz_check(a: Multivector, b: Multivector, asg) -> CheckResult:
    """``d(ab) == d(a) b + (-1)^|a| a d(b)`` for homogeneous ``a``."""
    lhs = boundary(a * b, asg)
    sgn = -1 if a.degree() & 1 else 1
    rhs = boundary(a, asg) * b + (a * boundary(b, asg)).scale(sgn)
    return CheckResult("leibniz", lhs == rhs, lhs=lhs, rhs=rhs)


def delta_nabla_check(c: Multivector, n: int, order=None) -> CheckResult:
    """The difference operator equals the boundary of the difference homotopy."""
    lhs = nabla_map(n, order).boundary().apply(c)
    rhs = full_delta(c, n)
    return CheckResult("delta_is_boundary_of_nabla", lhs == rhs, lhs=lhs, rhs=rhs)


def _homogeneous(rng, ctx, deg, nterms=3):
    for _ in range(20):
        m = random_multivector(rng, ctx, deg, nterms)
        if m:
            k = min(m.degrees())
            return m.homogeneous_part(k)
    return Multivector.scalar(1, ctx)


def verify_suite(seed: int, sys: PolySystem | None = None, D: int | None = None,
                 rounds: int = 3) -> tuple[PolySystem, list[CheckResult]]:
    """Run every exact identity on ``sys`` (random from ``seed`` if absent).

    The same seed always produces the same system, samples and results.
    """
    rng = random.Random(seed)
    if sys is None:
        n = rng.randint(1, 2)
        s = rng.randint(n, 3)
        sys = random_system(rng, n, s, 2)
    n, s = sys.n, sys.s
    cx = sys.koszul()
    xyz = Context((VarFamily(X, n),), (OddFamily(FX, s),))
    dctx = Context((VarFamily("x*", n, X),), (OddFamily("fx*", s, FX),))
    zctx = Context((VarFamily(Z, n),), (OddFamily(FZ, s),))
    pctx = Context((VarFamily("xp", n),), (OddFamily("up", n),))
    results: list[CheckResult] = []
    rev = tuple(reversed(range(n)))
    results.append(telescoping_check(sys))
    results.append(telescoping_check(sys, rev))
    for _ in range(rounds):
        c = random_multivector(rng, xyz, 3)
        results.append(boundary_square_check(c, cx.asg))
        results.append(boundary_square_check(random_multivector(rng, dctx, 3), cx.asg))
        results.append(leibniz_check(_homogeneous(rng, xyz, 2), random_multivector(rng, xyz, 2), cx.asg))
        results.append(delta_nabla_check(random_multivector(rng, pctx, 2), n))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        results.append(jacobian_is_cycle(sys))
        results.append(jacobian_is_cycle(sys, rev))
        for _ in range(rounds):
            results.append(main_theorem_check(sys, random_multivector(rng, zctx, 2)))
            results.append(jmap_morphism_check(sys, random_multivector(rng, dctx, 3, nterms=4)))
            results.append(j_map_skewlinearity_check(sys, random_multivector(rng, dctx, 3, nterms=4),
                                                     random_multivector(rng, xyz, 2)))
    cert = jacobian_order_independence(sys, rev, D)
    results.append(CheckResult("order_independence", cert.found, lhs=cert.target,
                               rhs=None, detail={"certificate": cert}))
    return sys, results
