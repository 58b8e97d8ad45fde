"""Divided-difference homotopy, difference Jacobian, J-map and J-product.

Family names used throughout:

``x, y, z``   copies of the system variables (``xp`` is a fourth copy),
``fx, fy, fz`` odd generators standing for ``f(x), f(y), f(z)``,
``u``         odd generators with boundary ``x - y`` (``up`` for ``xp - y``).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .grassmann import (Context, Multivector, OddFamily, contract_left, contract_top,
                        dual_name, exp_det, subst_morphism)
from .koszul import Complex, ComplexMap, boundary, dual_basis_element
from .poly import (NotDivisibleError, Polynomial, VarFamily, divexact_terms,
                   divided_difference)

X, Y, Z, XP = "x", "y", "z", "xp"
FX, FY, FZ = "fx", "fy", "fz"
U, UP = "u", "up"


class DegenerateSystemWarning(UserWarning):
    """The system has fewer equations than variables."""


def _check_order(order, n):
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 0..{n - 1}")
    return order


class PolySystem:
    """Polynomials ``f_1..f_s`` in variables ``x_1..x_n``.

    ``order`` is the (0-based) variable order used by the divided
    differences; ``names`` are display names of the variables.
    """

    def __init__(self, f: Sequence[Polynomial], n: int | None = None,
                 order: Sequence[int] | None = None, names: Sequence[str] | None = None):
        if n is None:
            if not f:
                raise ValueError("cannot infer the variable count of an empty system")
            n = f[0].context[0].arity if f[0].context else 0
        self.xfam = VarFamily(X, n)
        polys = []
        for p in f:
            if p.context != (self.xfam,):
                if len(p.context) == 1 and p.context[0].arity == n:
                    p = Polynomial((self.xfam,), p.terms)
                else:
                    raise ValueError("system polynomials must live in the single family x")
            polys.append(p)
        self.f = tuple(polys)
        self.n = n
        self.s = len(polys)
        self.order = _check_order(order, n)
        if names is None:
            names = ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]
        if len(names) != n:
            raise ValueError("need one display name per variable")
        self.names = tuple(names)
        self._nabla: dict = {}

    @classmethod
    def from_terms(cls, n: int, polys, **kw):
        """Build from dictionaries ``{exponent tuple: coefficient}``."""
        fam = VarFamily(X, n)
        return cls([Polynomial((fam,), t) for t in polys], n=n, **kw)

    def with_order(self, order) -> "PolySystem":
        return PolySystem(self.f, self.n, order, self.names)

    def __eq__(self, other):
        return (isinstance(other, PolySystem) and self.n == other.n and self.f == other.f
                and self.order == other.order and self.names == other.names)

    def __repr__(self):
        return f"PolySystem(n={self.n}, f={list(self.f)}, order={self.order})"

    @property
    def degrees(self) -> list[int]:
        return [max(p.degree(), 0) for p in self.f]

    def default_degree(self) -> int:
        """``max(sum(deg f_i - 1) + 1, max deg f_i)``."""
        if not self.f:
            return 1
        degs = self.degrees
        return max(sum(d - 1 for d in degs) + 1, max(degs))

    # polynomials in the various copies --------------------------------
    def poly_in(self, p: Polynomial, family: str) -> Multivector:
        fam = VarFamily(family, self.n)
        ctx = Context((fam,))
        return Multivector(ctx, {(e, ()): c for e, c in p.terms.items()}, _trusted=True)

    def values(self, family: str) -> list[Multivector]:
        return [self.poly_in(p, family) for p in self.f]

    def nabla(self, order=None) -> list[list[Multivector]]:
        """``nabla[i][k]`` = k-th divided difference of f_i, in ``(x, y)``."""
        order = self.order if order is None else _check_order(order, self.n)
        if order not in self._nabla:
            ctx = Context((VarFamily(X, self.n), VarFamily(Y, self.n)))
            rows = []
            for p in self.f:
                comps = divided_difference(p, order, y_name=Y)
                rows.append([Multivector(ctx, {(e, ()): c for e, c in q.terms.items()}, _trusted=True)
                             for q in comps])
            self._nabla[order] = rows
        return self._nabla[order]

    # complexes ----------------------------------------------------------
    def koszul(self, var: str = X, gen: str = FX) -> Complex:
        ctx = Context((VarFamily(var, self.n),), (OddFamily(gen, self.s),))
        return Complex(ctx, {gen: self.values(var)})

    def xy_complex(self) -> Complex:
        ctx = Context((VarFamily(X, self.n), VarFamily(Y, self.n)),
                      (OddFamily(FX, self.s), OddFamily(FY, self.s)))
        return Complex(ctx, {FX: self.values(X), FY: self.values(Y)})

    def xy_assignment(self) -> dict:
        return {FX: self.values(X), FY: self.values(Y)}


def difference_assignment(n: int, src: str = X, out: str = U, other: str = Y) -> dict:
    """``out^k -> src_k - other_k``."""
    ctx = Context((VarFamily(src, n), VarFamily(other, n)))
    return {out: [Multivector.var(ctx, src, k) - Multivector.var(ctx, other, k) for k in range(n)]}


# difference operators -------------------------------------------------

def _staircase(n, order, step, second, src_even, src_odd, dst_even, dst_odd, lower):
    """Substitution images for one telescoping step.

    Variables earlier than ``order[step]`` go to ``lower`` with their odd
    partner set to 0; the step variable goes to ``dst_even`` (or ``lower``
    for the second substitution) with odd partner 0 when it is the
    homotopy step; later variables go to ``dst_even``/``dst_odd``.
    """
    ctx = Context((VarFamily(dst_even, n), VarFamily(lower, n)), (OddFamily(dst_odd, n),))
    pos = {v: i for i, v in enumerate(order)}
    evs, ods = [], []
    for j in range(n):
        before = pos[j] < step or (second and pos[j] == step)
        evs.append(Multivector.var(ctx, lower if before else dst_even, j))
        ods.append(Multivector.zero(ctx) if pos[j] <= step else Multivector.gen(ctx, dst_odd, j))
    return {src_even: evs, src_odd: ods}


def delta_k(c: Multivector, k: int, n: int, order=None) -> Multivector:
    """Difference of the two substitutions around variable ``k`` (0-based).

    For ``c`` in ``(x, u)``: variables before ``k`` (in ``order``) become
    ``y`` with ``u`` set to 0 in both terms; ``x_k`` stays in the first
    term and becomes ``y_k`` in the second, where ``u_k`` is also 0.
    """
    order = _check_order(order, n)
    step = order.index(k)
    ctx = Context((VarFamily(X, n), VarFamily(Y, n)), (OddFamily(U, n),))
    pos = {v: i for i, v in enumerate(order)}

    def images(second):
        evs, ods = [], []
        for j in range(n):
            low = pos[j] < step or (second and pos[j] == step)
            evs.append(Multivector.var(ctx, Y if low else X, j))
            zero = pos[j] < step or (second and pos[j] == step)
            ods.append(Multivector.zero(ctx) if zero else Multivector.gen(ctx, U, j))
        return {X: evs, U: ods}

    return subst_morphism(c, images(False)) - subst_morphism(c, images(True))


def full_delta(c: Multivector, n: int, src_even: str = XP, src_odd: str = UP) -> Multivector:
    """``c(x, u) - c(y, 0)`` for ``c`` in the source families."""
    ctx = Context((VarFamily(X, n), VarFamily(Y, n)), (OddFamily(U, n),))
    first = {src_even: [Multivector.var(ctx, X, j) for j in range(n)],
             src_odd: [Multivector.gen(ctx, U, j) for j in range(n)]}
    second = {src_even: [Multivector.var(ctx, Y, j) for j in range(n)],
              src_odd: [Multivector.zero(ctx)] * n}
    return subst_morphism(c, first) - subst_morphism(c, second)


def _divexact_mv(m: Multivector, a: str, b: str, k: int) -> Multivector:
    ia = m.ctx.even_pos(a, k)
    ib = m.ctx.even_pos(b, k)

    def split(key):
        exps, word = key
        rest = list(exps)
        i, j = rest[ia], rest[ib]
        rest[ia] = rest[ib] = 0
        return (tuple(rest), word), i, j

    def join(rest, i, j):
        exps, word = rest
        e = list(exps)
        e[ia], e[ib] = i, j
        return (tuple(e), word)

    return Multivector(m.ctx, divexact_terms(m.terms, split, join), _trusted=True)


def _split_input(c: Multivector, inputs: set[str]):
    """Group terms as ``sign * X * Y`` with X over ``inputs`` and Y the rest."""
    ctx = c.ctx
    in_ctx = Context([f for f in ctx.evens if f.name in inputs],
                     [f for f in ctx.odds if f.name in inputs])
    sp_ctx = ctx.without(inputs)
    in_pos = [i for f in ctx.evens if f.name in inputs
              for i in range(ctx.even_offset[f.name], ctx.even_offset[f.name] + f.arity)]
    sp_pos = [i for f in ctx.evens if f.name not in inputs
              for i in range(ctx.even_offset[f.name], ctx.even_offset[f.name] + f.arity)]
    in_gen = {}
    sp_gen = {}
    for fam in ctx.odds:
        target = in_ctx if fam.name in inputs else sp_ctx
        table = in_gen if fam.name in inputs else sp_gen
        for i in range(fam.arity):
            table[ctx.odd_offset[fam.name] + i] = target.odd_offset[fam.name] + i
    groups = []
    for (exps, word), coef in c.terms.items():
        inv = 0
        seen_sp = 0
        for g in word:
            if g in sp_gen:
                seen_sp += 1
            else:
                inv += seen_sp
        sign = -1 if inv & 1 else 1
        xk = (tuple(exps[i] for i in in_pos), tuple(in_gen[g] for g in word if g in in_gen))
        yk = (tuple(exps[i] for i in sp_pos), tuple(sp_gen[g] for g in word if g in sp_gen))
        groups.append((xk, yk, coef * sign))
    return in_ctx, sp_ctx, groups


def nabla_apply(c: Multivector, n: int, order=None, src_even: str = XP, src_odd: str = UP) -> Multivector:
    """Difference homotopy: from ``(xp, up)`` to ``(x, y, u)``.

    ``nabla.c = sum_k u_k * (first_k - second_k) / (x_k - y_k)`` where the
    two substitutions telescope ``c(x, u) - c(y, 0)`` along ``order``.
    Families other than the source ones are treated as scalars and pass
    through on the right.
    """
    order = _check_order(order, n)
    in_ctx, sp_ctx, groups = _split_input(c, {src_even, src_odd})
    out_ctx = Context((VarFamily(X, n), VarFamily(Y, n)), (OddFamily(U, n),))
    stairs = [(_staircase(n, order, k, False, src_even, src_odd, X, U, Y),
               _staircase(n, order, k, True, src_even, src_odd, X, U, Y)) for k in range(n)]
    cache: dict = {}

    def on_input(key):
        if key not in cache:
            mono = Multivector(in_ctx, {key: Fraction(1)}, _trusted=True)
            total = Multivector.zero(out_ctx)
            for k, v in enumerate(order):
                first, second = stairs[k]
                diff = subst_morphism(mono, first) - subst_morphism(mono, second)
                if not diff:
                    continue
                diff = diff.to(out_ctx)
                try:
                    q = _divexact_mv(diff, X, Y, v)
                except NotDivisibleError as exc:
                    raise NotDivisibleError(f"telescoping step {v} not divisible: {exc}") from None
                total = total + Multivector.gen(out_ctx, U, v) * q
            cache[key] = total
        return cache[key]

    result = Multivector.zero(out_ctx.union(sp_ctx))
    for xk, yk, coef in groups:
        img = on_input(xk)
        if not img:
            continue
        spect = Multivector(sp_ctx, {yk: coef}, _trusted=True)
        result = result + img * spect
    return result


def nabla_map(n: int, order=None, spectators: Context | None = None) -> ComplexMap:
    """The difference homotopy as a lazy map of complexes.

    Source: ``(xp, up)`` with ``up -> xp - y``; target ``(x, y, u)`` with
    ``u -> x - y``.
    """
    src_ctx = Context((VarFamily(XP, n),), (OddFamily(UP, n),))
    tgt_ctx = Context((VarFamily(X, n), VarFamily(Y, n)), (OddFamily(U, n),))
    source = Complex(src_ctx, difference_assignment(n, XP, UP, Y))
    target = Complex(tgt_ctx, difference_assignment(n, X, U, Y))
    return ComplexMap(source, target, 1, func=lambda c: nabla_apply(c, n, order))


# difference Jacobian ------------------------------------------------------

@dataclass
class DiffJacobian:
    J: Multivector
    order: tuple
    degree: int

    def __repr__(self):
        return f"DiffJacobian(order={self.order}, J={self.J!r})"


def _jacobian_rows(sys: PolySystem, order, top_values, bottom_sign=1):
    n = sys.n
    nab = sys.nabla(order)
    top = [(tv, [Fraction(-1) if j == k else Fraction(0) for j in range(n)])
           for k, tv in enumerate(top_values)]
    fx, fy = _gens(sys, FX), _gens(sys, FY)
    bottom = [((fx[i] - fy[i]).scale(bottom_sign), [-nab[i][k] for k in range(n)])
              for i in range(sys.s)]
    return top, bottom


def _gens(sys: PolySystem, name: str) -> list[Multivector]:
    ctx = Context((), (OddFamily(name, sys.s),))
    return [Multivector.gen(ctx, name, i) for i in range(sys.s)]


def difference_jacobian(sys: PolySystem, order=None) -> DiffJacobian:
    """``J`` in ``(x, y, fx, fy)``: exp-det of ``nabla f`` over ``fx - fy``.

    Equal to ``det[nabla^k f_i]`` when s = n.  For s < n the contraction
    has no full-rank term and J = 0; a warning is emitted.
    """
    order = sys.order if order is None else _check_order(order, sys.n)
    ctx = sys.xy_complex().ctx
    if sys.s < sys.n:
        warnings.warn(f"system has s={sys.s} < n={sys.n}; the difference Jacobian is 0",
                      DegenerateSystemWarning, stacklevel=2)
    top, bottom = _jacobian_rows(sys, order, [0] * sys.n)
    J = exp_det(top, bottom).to(ctx) if (top or bottom) else Multivector.scalar(1, ctx)
    return DiffJacobian(J, order, sys.s - sys.n)


def jacobian_u_form(sys: PolySystem, order=None) -> Multivector:
    """The same Jacobian written with ``u`` itself as the contracted family."""
    order = sys.order if order is None else _check_order(order, sys.n)
    n, s = sys.n, sys.s
    nab = sys.nabla(order)
    uctx = Context((), (OddFamily(U, n), OddFamily(U, n).dual()))
    u = [Multivector.gen(uctx, U, k) for k in range(n)]
    us = [Multivector.gen(uctx, dual_name(U), k) for k in range(n)]
    fx, fy = _gens(sys, FX), _gens(sys, FY)
    prod = Multivector.scalar(1, uctx)
    for k in reversed(range(n)):
        prod = prod * (-us[k])
    for i in range(s):
        row = fx[i] - fy[i]
        for k in range(n):
            row = row - u[k] * nab[i][k]
        prod = prod * row
    return contract_top(prod, [U]).to(sys.xy_complex().ctx)


@dataclass
class CheckResult:
    """Outcome of an exact identity check."""

    name: str
    passed: bool
    lhs: Multivector | None = None
    rhs: Multivector | None = None
    detail: dict = field(default_factory=dict)

    @property
    def difference(self):
        if self.lhs is None or self.rhs is None:
            return None
        return self.lhs - self.rhs

    def __bool__(self):
        return self.passed


def jacobian_is_cycle(sys: PolySystem, order=None) -> CheckResult:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J = difference_jacobian(sys, order).J
    d = boundary(J, sys.xy_assignment())
    return CheckResult("jacobian_is_cycle", not d, lhs=d, rhs=Multivector.zero(d.ctx))


def jacobian_order_independence(sys: PolySystem, order2, D: int | None = None):
    """Certify ``J(order) - J(order2)`` as a boundary in ``(x, y, fx, fy)``."""
    from .homology import solve_boundary_membership
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J1 = difference_jacobian(sys).J
        J2 = difference_jacobian(sys, order2).J
    cx = sys.xy_complex()
    D = sys.default_degree() if D is None else D
    return solve_boundary_membership(J1 - J2, cx.asg, D, ctx=cx.ctx)


# the T-term and the main identity -----------------------------------------

def augmented_det(sys: PolySystem, top_values, bottom_sign=1, order=None) -> Multivector:
    """``det || nabla f, B ; F, 0 ||`` with ``B`` = top_values, ``F`` = +-(fx - fy)."""
    order = sys.order if order is None else _check_order(order, sys.n)
    top, bottom = _jacobian_rows(sys, order, top_values, bottom_sign)
    if not top and not bottom:
        return Multivector.scalar(1)
    return exp_det(top, bottom)


def t_term(sys: PolySystem, order=None) -> ComplexMap:
    """The explicit homotopy ``T`` from ``C(z, fz)`` to ``C(x, y, fx, fy)``.

    ``T.c = top_u( D' * nabla( c(xp, fy + up * nabla f(xp, y)) ) )`` with
    ``D' = det|| nabla f, u* ; -(fx - fy), 0 ||``.  Its degree is s - n + 1.
    """
    order = sys.order if order is None else _check_order(order, sys.n)
    n, s = sys.n, sys.s
    uctx = Context((), (OddFamily(U, n).dual(),))
    ustar = [Multivector.gen(uctx, dual_name(U), k) for k in range(n)]
    Dp = augmented_det(sys, ustar, bottom_sign=-1, order=order)
    # images of the substitution z -> xp, fz -> fy + up * nabla f(xp, y)
    nab = sys.nabla(order)
    sub_ctx = Context((VarFamily(XP, n), VarFamily(Y, n)), (OddFamily(FY, s), OddFamily(UP, n)))
    ren = {X: XP}
    z_img = [Multivector.var(sub_ctx, XP, k) for k in range(n)]
    fz_img = []
    for i in range(s):
        img = Multivector.gen(sub_ctx, FY, i)
        for k in range(n):
            img = img + Multivector.gen(sub_ctx, UP, k) * nab[i][k].rename(ren)
        fz_img.append(img)
    source = sys.koszul(Z, FZ)
    target = sys.xy_complex()

    def apply(c: Multivector) -> Multivector:
        sc = subst_morphism(c, {Z: z_img, FZ: fz_img})
        nb = nabla_apply(sc, n, order)
        return contract_top(Dp * nb, [U]).to(target.ctx.union(nb.ctx).without([U, dual_name(U), XP, UP]))

    return ComplexMap(source, target, s - n + 1, func=apply)


def _copy(c: Multivector, even_to: str, odd_to: str, even_from: str = Z, odd_from: str = FZ):
    return c.rename({even_from: even_to, odd_from: odd_to})


def main_theorem_check(sys: PolySystem, c: Multivector, order=None) -> CheckResult:
    """``J * (c(x, fx) - c(y, fy)) == d[T].c`` exactly, for ``c`` in ``(z, fz)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J = difference_jacobian(sys, order).J
    lhs = J * (_copy(c, X, FX) - _copy(c, Y, FY))
    T = t_term(sys, order)
    rhs = T.boundary().apply(c)
    return CheckResult("main_theorem", lhs == rhs, lhs=lhs, rhs=rhs)


# duality ------------------------------------------------------------------

def _dual_in(c: Multivector, even_to: str, odd_to: str) -> Multivector:
    """Rename a functional on ``(x, fx)`` or ``(y, fy)`` to the given copy."""
    names = set(c.ctx.names())
    for ev, od in ((X, FX), (Y, FY), (Z, FZ)):
        if dual_name(ev) in names or dual_name(od) in names:
            if ev == even_to:
                return c
            return c.rename({ev: even_to, od: odd_to})
    return c


def as_x_functional(c: Multivector) -> Multivector:
    return _dual_in(c, X, FX)


def j_map(sys: PolySystem, c: Multivector, J: Multivector | None = None) -> Multivector:
    """``top_(y, fy)( J * c(y*, fy*) )``, landing in ``C(x, fx)``."""
    if J is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateSystemWarning)
            J = difference_jacobian(sys).J
    cy = _dual_in(c, Y, FY)
    out = contract_top(J * cy, [Y, FY])
    return out.to(out.ctx.union(sys.koszul().ctx))


def j_product(sys: PolySystem, c1: Multivector, c2: Multivector,
              J: Multivector | None = None) -> Multivector:
    """``bot_(x, fx)( c1(x*, fx*) * jmap(c2) )``."""
    c1x = _dual_in(c1, X, FX)
    return contract_left(c1x * j_map(sys, c2, J), [X, FX])


def left_action(e: Multivector, c: Multivector) -> Multivector:
    """``bot_(x, fx)( e(x*, fx*) * c(x, fx) )``."""
    return contract_left(_dual_in(e, X, FX) * c, [X, FX])


def monomial_support(a: Multivector) -> list[Multivector]:
    return [Multivector(a.ctx, {k: Fraction(1)}, _trusted=True) for k, _ in a.sorted_terms()]


def j_map_skewlinearity_check(sys: PolySystem, c: Multivector, a: Multivector) -> CheckResult:
    """``jmap(c) * a - jmap(bot(c * a))`` against the explicit ``d[T]`` term.

    The right side is ``top_y top_z ( dT * c(y*, fy*) * a(z, fz) )`` where
    ``dT`` is ``d[T]`` written out on the monomials of ``a``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J = difference_jacobian(sys).J
    lhs = j_map(sys, c, J) * a - j_map(sys, left_action(c, a), J)
    dT = t_term(sys).boundary()
    az = a.rename({X: Z, FX: FZ})
    element = Multivector.zero()
    for b in monomial_support(az):
        element = element + dT.apply(b) * dual_basis_element(b)
    cy = _dual_in(c, Y, FY)
    rhs = contract_top(contract_top(element * cy * az, [Z, FZ]), [Y, FY])
    return CheckResult("jmap_skewlinearity", lhs == rhs, lhs=lhs, rhs=rhs)


def jmap_morphism_check(sys: PolySystem, c: Multivector) -> CheckResult:
    """``d[jmap(c)] == (-1)^|J| jmap(d c)`` with the full dual boundary."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J = difference_jacobian(sys).J
    cx = as_x_functional(c)
    lhs = boundary(j_map(sys, cx, J), sys.koszul().asg)
    sgn = -1 if (sys.s - sys.n) & 1 else 1
    rhs = j_map(sys, boundary(cx, sys.koszul().asg), J).scale(sgn)
    return CheckResult("jmap_morphism", lhs == rhs, lhs=lhs, rhs=rhs)


def j_product_bimorphism_check(sys: PolySystem, c1: Multivector, c2: Multivector) -> CheckResult:
    """``d jp(c1, c2) == jp(d c1, c2) + (-1)^(|c1|+|J|) jp(c1, d c2)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        J = difference_jacobian(sys).J
    asg = sys.koszul().asg
    c1, c2 = as_x_functional(c1), as_x_functional(c2)
    lhs = boundary(j_product(sys, c1, c2, J), asg)
    sgn = -1 if (c1.degree() + sys.s - sys.n) & 1 else 1
    rhs = j_product(sys, boundary(c1, asg), c2, J) + j_product(sys, c1, boundary(c2, asg), J).scale(sgn)
    return CheckResult("jproduct_bimorphism", lhs == rhs, lhs=lhs, rhs=rhs)
