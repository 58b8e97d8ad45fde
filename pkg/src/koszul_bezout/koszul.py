"""Boundary operators on cochains, functionals and linear maps.

A boundary assignment sends every primal odd family to a list of even
values (``f^i -> f_i(x)``, ``u^k -> x_k - y_k``).  One routine handles
all three kinds of elements: primal generators are differentiated as a
left derivation, and dual content ``Phi`` is differentiated as the signed
adjoint ``-(-1)^|Phi| Phi o d``.  On an operator ``out (x) Phi`` this is
exactly ``d[a].c = d[a.c] - (-1)^|a| a.d[c]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .grassmann import (Context, Multivector, OddFamily, contract_top, dual_name,
                        merge_words, sort_word)
from .poly import ContextError, Polynomial


class UnassignedGeneratorError(KeyError):
    """An odd generator has no boundary value."""


Assignment = Mapping[str, Sequence]


def _as_values(vals) -> list[Multivector]:
    out = []
    for v in vals:
        if isinstance(v, Polynomial):
            v = Multivector.from_poly(v)
        elif not isinstance(v, Multivector):
            v = Multivector.scalar(v)
        if v and (v.parity() != 0 or v.degree() != 0):
            raise ValueError("boundary values must be even of degree 0")
        out.append(v)
    return out


def normalize_assignment(asg: Assignment) -> dict[str, list[Multivector]]:
    return {name: _as_values(vals) for name, vals in asg.items()}


def merge_assignments(*asgs: Assignment) -> dict[str, list[Multivector]]:
    out: dict[str, list[Multivector]] = {}
    for asg in asgs:
        for name, vals in normalize_assignment(asg).items():
            if name in out and any(a != b for a, b in zip(out[name], vals)):
                raise ContextError(f"conflicting boundary values for {name!r}")
            out[name] = vals
    return out


def _value_terms(val: Multivector, ctx: Context):
    """Terms of an even value as lists of ``(family, index, power)``."""
    vctx = val.ctx
    out = []
    for (exps, _), c in val.terms.items():
        factors = []
        for fam in vctx.evens:
            off = vctx.even_offset[fam.name]
            for i in range(fam.arity):
                if exps[off + i]:
                    factors.append((fam.name, i, exps[off + i]))
        out.append((factors, c))
    return out


def boundary(c: Multivector, asg: Assignment) -> Multivector:
    """Total boundary of ``c`` for the given generator values.

    Primal generators are replaced by their values (left derivation with
    sign ``(-1)^j`` at position ``j``).  For every dual family ``g*`` in the
    context, the dual content is composed with ``value(g) * iota_g``:
    the dual word gets ``g*`` appended on the right and the value acts on
    the dual variables it pairs with (lowering their exponents); value
    variables without a dual partner are multiplied in.
    """
    asg = normalize_assignment(asg)
    ctx = c.ctx
    for vals in asg.values():
        for v in vals:
            ctx = ctx.union(v.ctx)
    # dual partners of value variables may be needed as primal exponents
    c = c.to(ctx)
    vals_by_gen: dict[int, list] = {}
    duals_present = []  # (dual gen id, primal gen id or None, value terms)
    for g in range(ctx.nodd):
        fam = ctx.odds[ctx.gen_family[g]]
        idx = ctx.gen_index[g]
        if fam.is_dual:
            p = fam.dual_of
            if p not in asg:
                raise UnassignedGeneratorError(f"no boundary value for {p!r}")
            duals_present.append((g, asg[p][idx]))
        elif fam.name in asg:
            vals_by_gen[g] = asg[fam.name][idx]
    # precompute embedded values for the primal part
    embedded = {g: v.to(ctx) for g, v in vals_by_gen.items()}
    # value terms acting on dual content: list of (shifts, coef)
    acting = []
    for g, v in duals_present:
        terms = []
        for factors, coef in _value_terms(v, ctx):
            dual_shift, primal_mult = [], []
            for name, i, k in factors:
                dn = dual_name(name)
                if ctx.has(dn):
                    dual_shift.append((ctx.even_offset[dn] + i, k))
                else:
                    primal_mult.append((ctx.even_offset[name] + i, k))
            terms.append((dual_shift, primal_mult, coef))
        acting.append((g, terms))

    out: dict = {}

    def add(key, val):
        v = out.get(key, 0) + val
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    gen_dual = ctx.gen_dual
    for (exps, word), coef in c.terms.items():
        # factor the word as (primal part) * (dual part)
        prim = [g for g in word if not gen_dual[g]]
        dual = tuple(g for g in word if gen_dual[g])
        inv = 0
        seen_dual = 0
        for g in word:
            if gen_dual[g]:
                seen_dual += 1
            else:
                inv += seen_dual
        fsign = -1 if inv & 1 else 1
        base = coef * fsign
        # primal part: sum_j (-1)^j val(p_j) * P\p_j * Phi
        for j, g in enumerate(prim):
            if g not in embedded:
                fam = ctx.odds[ctx.gen_family[g]]
                raise UnassignedGeneratorError(f"no boundary value for {fam.name!r}")
            val = embedded[g]
            rest = tuple(prim[:j] + prim[j + 1:])
            sgn, w = merge_words(rest, dual)
            # rest and dual come from a sorted word, so merging only reorders groups
            s = base * (-1 if j & 1 else 1)
            for (vexps, _), vc in val.terms.items():
                key = (tuple(a + b for a, b in zip(exps, vexps)), w)
                add(key, s * sgn * vc)
        # dual part: (-1)^{|P|} * P * ( -(-1)^{|Phi|} sum_g Phi o (val(g) iota_g) )
        if acting:
            s0 = base * (-1 if len(prim) & 1 else 1) * (1 if len(dual) & 1 else -1)
            ptuple = tuple(prim)
            for g, terms in acting:
                k = 0
                for h in dual:
                    if h == g:
                        break
                    if h > g:
                        k += 1
                else:
                    # appending g* on the right and sorting: passes the larger ones
                    newdual = tuple(sorted(dual + (g,)))
                    s1 = -1 if k & 1 else 1
                    sgn, w = merge_words(ptuple, newdual)
                    for dual_shift, primal_mult, vc in terms:
                        new = list(exps)
                        ok = True
                        for pos, e in dual_shift:
                            if new[pos] < e:
                                ok = False
                                break
                            new[pos] -= e
                        if not ok:
                            continue
                        for pos, e in primal_mult:
                            new[pos] += e
                        add((tuple(new), w), s0 * s1 * sgn * vc)
    return Multivector(ctx, out, _trusted=True)


def is_cycle(c: Multivector, asg: Assignment) -> bool:
    return not boundary(c, asg)


@dataclass
class Complex:
    """A free complex: primal families with their boundary values.

    ``ctx`` holds the even and odd primal families of the complex and
    ``asg`` gives the values of its odd generators.
    """

    ctx: Context
    asg: dict = field(default_factory=dict)

    def __post_init__(self):
        self.asg = normalize_assignment(self.asg)

    @property
    def names(self) -> list[str]:
        return self.ctx.names()

    def boundary(self, c: Multivector) -> Multivector:
        return boundary(c, self.asg)

    def renamed(self, mapping: Mapping[str, str]) -> "Complex":
        ctx = Multivector.zero(self.ctx).rename(mapping).ctx
        asg = {}
        for name, vals in self.asg.items():
            asg[mapping.get(name, name)] = [v.rename(mapping) for v in vals]
        return Complex(ctx, asg)


def _input_renaming(source: Complex, target: Complex) -> dict[str, str]:
    """Rename source families that clash with target families."""
    taken = set(target.names) | set(source.names)
    mapping = {}
    for name in source.names:
        if target.ctx.has(name) or target.ctx.has(dual_name(name)):
            new = name + "_in"
            while new in taken:
                new += "_"
            taken.add(new)
            mapping[name] = new
    return mapping


class ComplexMap:
    """A linear map between free complexes of fixed degree.

    It is stored either as an element ``sum out (x) functional`` in the
    context ``target + duals(source)`` (applied by full contraction over
    the source families), or lazily as a Python callable.  Source names
    clashing with target names are renamed internally.
    """

    def __init__(self, source: Complex, target: Complex, degree: int,
                 element: Multivector | None = None,
                 func: Callable[[Multivector], Multivector] | None = None):
        if (element is None) == (func is None):
            raise ValueError("give exactly one of element and func")
        self.source = source
        self.target = target
        self.degree = degree
        self.inmap = _input_renaming(source, target)
        self.inner_source = source.renamed(self.inmap) if self.inmap else source
        if element is not None and element:
            if element.degrees() != {degree}:
                raise ValueError(f"element is not homogeneous of degree {degree}")
        self.element = element
        self.func = func

    # construction helpers ---------------------------------------------
    @classmethod
    def identity(cls, cx: Complex, basis: Sequence[Multivector]):
        """Identity restricted to the span of ``basis`` (monomials)."""
        return cls.from_images(cx, cx, 0, [(b, b) for b in basis])

    @classmethod
    def from_images(cls, source: Complex, target: Complex, degree: int, pairs):
        """Element form of the map sending each basis monomial ``b`` to ``img``.

        The map is zero on monomials not listed.
        """
        probe = cls(source, target, degree, func=lambda c: c)
        total = Multivector.zero(target.ctx)
        for b, img in pairs:
            b_in = b.rename(probe.inmap) if probe.inmap else b
            total = total + img * dual_basis_element(b_in)
        return cls(source, target, degree, element=total)

    # application ------------------------------------------------------
    @property
    def is_lazy(self) -> bool:
        return self.func is not None

    def _input_names(self) -> list[str]:
        return self.inner_source.names

    def apply(self, c: Multivector) -> Multivector:
        if self.func is not None:
            return self.func(c)
        c_in = c.rename(self.inmap) if self.inmap else c
        return contract_top(self.element * c_in, self._input_names())

    __call__ = apply

    def boundary(self) -> "ComplexMap":
        """``d[a]: c -> d[a.c] - (-1)^|a| a.d[c]``."""
        if self.func is None:
            asg = merge_assignments(self.target.asg, self.inner_source.asg)
            el = boundary(self.element, asg)
            return ComplexMap(self.source, self.target, self.degree - 1, element=el)
        sgn = -1 if self.degree & 1 else 1

        def func(c):
            return self.target.boundary(self.apply(c)) - self.apply(self.source.boundary(c)).scale(sgn)

        return ComplexMap(self.source, self.target, self.degree - 1, func=func)

    def compose(self, other: "ComplexMap") -> "ComplexMap":
        """``self . other`` (apply ``other`` first)."""
        if set(other.target.names) != set(self.source.names):
            raise ContextError("composition needs matching complexes")
        deg = self.degree + other.degree
        if self.func is not None or other.func is not None:
            return ComplexMap(other.source, self.target, deg,
                              func=lambda c: self.apply(other.apply(c)))
        probe = ComplexMap(other.source, self.target, deg, func=lambda c: c)
        tmp = {n: f"{n}~tmp" for n in other.source.names}
        oel = other.element.rename({other.inmap.get(n, n): t for n, t in tmp.items()})
        if self.inmap:
            oel = oel.rename(self.inmap)
        el = contract_top(self.element * oel, self.inner_source.names)
        el = el.rename({t: probe.inmap.get(n, n) for n, t in tmp.items()})
        return ComplexMap(other.source, self.target, deg, element=el)

    def restrict(self, basis: Sequence[Multivector]) -> "ComplexMap":
        """Element form agreeing with this map on the span of ``basis``."""
        return ComplexMap.from_images(self.source, self.target, self.degree,
                                      [(b, self.apply(b)) for b in basis])

    def is_zero_on(self, basis: Sequence[Multivector]) -> bool:
        return all(not self.apply(b) for b in basis)


def dual_basis_element(b: Multivector) -> Multivector:
    """Functional taking the value 1 on the single-term element ``b``."""
    if len(b.terms) != 1:
        raise ValueError("dual basis element needs a single term")
    ((exps, word), coef), = b.terms.items()
    ctx = b.ctx
    if any(ctx.gen_dual[g] for g in word) or ctx.even_dual_pos and any(exps[p] for p in ctx.even_dual_pos):
        raise ValueError("dual basis element needs a primal monomial")
    dctx = Context([f.__class__(dual_name(f.name), f.arity, f.name) for f in ctx.evens],
                   [OddFamily(dual_name(f.name), f.arity, f.name) for f in ctx.odds])
    words = [dctx.gen_id(*_dual_of(ctx.gen_name(g))) for g in word]
    sign, w = sort_word(words)
    # the dual word of a sorted primal word pairs to (-1)^(r(r-1)/2)
    r = len(word)
    pair = -1 if (r * (r - 1) // 2) & 1 else 1
    return Multivector(dctx, {(exps, w): Fraction(sign * pair) / coef}, _trusted=True)


def _dual_of(gen):
    name, idx = gen
    return dual_name(name), idx
