"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a finitely supported map from exponent vectors to
``Fraction`` coefficients over an ordered tuple of variable families.
Zero coefficients are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class ContextError(ValueError):
    """Raised when operands live over incompatible variable families."""


class NotDivisibleError(ArithmeticError):
    """Raised when an exact division leaves a nonzero remainder."""


@dataclass(frozen=True)
class VarFamily:
    """A family of commuting variables ``name_1 .. name_arity``.

    ``dual_of`` is set for the dual family ``x_*`` whose monomials
    ``(x^a)_*`` are coefficient-extraction functionals on ``R[x]``.
    """

    name: str
    arity: int
    dual_of: str | None = None

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be >= 0")


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


def grlex_key(exps: Sequence[int]):
    """Sort key putting higher total degree first, then lex-larger first."""
    return (-sum(exps), tuple(-e for e in exps))


def _family_offsets(context: Sequence[VarFamily]) -> dict[str, int]:
    offsets, pos = {}, 0
    for fam in context:
        if fam.name in offsets:
            raise ContextError(f"duplicate family {fam.name!r}")
        offsets[fam.name] = pos
        pos += fam.arity
    return offsets


class Polynomial:
    """Element of ``Q[context]`` stored as ``{exponent tuple: Fraction}``."""

    __slots__ = ("context", "terms", "_offsets")

    def __init__(self, context: Sequence[VarFamily], terms: Mapping | Iterable = ()):
        self.context = tuple(context)
        self._offsets = _family_offsets(self.context)
        nv = self.nvars
        clean: dict[tuple, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != nv:
                raise ContextError(f"exponent vector {exps} does not match {nv} variables")
            c = as_fraction(c)
            if c:
                c = clean.get(exps, 0) + c
                if c:
                    clean[exps] = c
                else:
                    clean.pop(exps, None)
        self.terms = clean

    # construction -----------------------------------------------------
    @property
    def nvars(self) -> int:
        return sum(f.arity for f in self.context)

    @classmethod
    def zero(cls, context):
        return cls(context)

    @classmethod
    def constant(cls, context, c):
        context = tuple(context)
        return cls(context, {(0,) * sum(f.arity for f in context): c})

    @classmethod
    def var(cls, context, family: str, index: int):
        """The variable ``family_index`` (0-based index)."""
        context = tuple(context)
        p = cls(context)
        pos = p.index_of(family, index)
        exps = [0] * p.nvars
        exps[pos] = 1
        p.terms = {tuple(exps): Fraction(1)}
        return p

    def index_of(self, family: str, index: int) -> int:
        try:
            off = self._offsets[family]
        except KeyError:
            raise ContextError(f"no family {family!r} in context") from None
        arity = next(f.arity for f in self.context if f.name == family)
        if not 0 <= index < arity:
            raise IndexError(f"{family}[{index}] out of range")
        return off + index

    # arithmetic -------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.context != other.context:
            raise ContextError("polynomials live over different contexts")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.context, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            if not c:
                return Polynomial(self.context)
            return self._new({e: v * c for e, v in self.terms.items()})
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.context, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.context == other.context and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.constant(self.context, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.context, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def _new(self, terms):
        p = Polynomial.__new__(Polynomial)
        p.context = self.context
        p._offsets = self._offsets
        p.terms = terms
        return p

    # inspection -------------------------------------------------------
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def coefficient(self, exps) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for x, k in zip(point, exps):
                if k:
                    term *= as_fraction(x) ** k
            total += term
        return total

    def __repr__(self):
        names = []
        for fam in self.context:
            names += [f"{fam.name}{i + 1}" if fam.arity > 1 else fam.name for i in range(fam.arity)]
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, exps) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    out: dict[tuple, Fraction] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return a._new(out)


def poly_subst(p: Polynomial, assignment) -> Polynomial:
    """Simultaneously substitute a polynomial for every variable of ``p``.

    ``assignment`` is either a sequence with one entry per variable of
    ``p.context`` or a mapping ``(family, index) -> Polynomial``.  All
    images must share one context, which is the context of the result.
    """
    if isinstance(assignment, Mapping):
        images = []
        for fam in p.context:
            for i in range(fam.arity):
                try:
                    images.append(assignment[(fam.name, i)])
                except KeyError:
                    raise KeyError(f"no image given for {fam.name}[{i}]") from None
    else:
        images = list(assignment)
        if len(images) != p.nvars:
            raise KeyError(f"assignment has {len(images)} entries, need {p.nvars}")
    if not images:
        # nothing to substitute into; keep constants in the empty context
        return Polynomial((), {(): p.terms.get((), 0)})
    target = images[0].context
    for im in images:
        if im.context != target:
            raise ContextError("substitution images live over different contexts")

    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i, k):
        key = (i, k)
        if key not in powers:
            powers[key] = images[i] ** k
        return powers[key]

    result = Polynomial(target)
    for exps, c in p.terms.items():
        term = Polynomial.constant(target, c)
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        result = result + term
    return result


def divexact_terms(terms: Mapping, split, join):
    """Exact division of a term dictionary by ``(a - b)``.

    ``split(key)`` returns ``(rest, i, j)`` where ``i``/``j`` are the
    exponents of ``a``/``b``; ``join(rest, i, j)`` rebuilds a key.
    Division is carried out separately for every ``rest`` group by
    peeling off the term with the highest power of ``a``.
    """
    groups: dict = {}
    for key, c in terms.items():
        rest, i, j = split(key)
        groups.setdefault(rest, {})[(i, j)] = c
    out = {}
    for rest, poly in groups.items():
        poly = dict(poly)
        while poly:
            (i, j) = max(poly, key=lambda ij: (ij[0], -ij[1]))
            c = poly.pop((i, j))
            if i == 0:
                raise NotDivisibleError("polynomial is not divisible by the linear factor")
            out[join(rest, i - 1, j)] = c
            # subtract c * a^(i-1) b^j * (a - b); the a^i b^j part is already removed
            k = (i - 1, j + 1)
            v = poly.get(k, 0) + c
            if v:
                poly[k] = v
            else:
                poly.pop(k, None)
    return out


def divexact_linear(p: Polynomial, a: tuple[str, int], b: tuple[str, int]) -> Polynomial:
    """Return ``q`` with ``q * (a - b) == p`` for variables ``a``, ``b``.

    Variables are named as ``(family, index)``; raises
    :class:`NotDivisibleError` if the division is not exact.
    """
    ia = p.index_of(*a)
    ib = p.index_of(*b)

    def split(e):
        rest = list(e)
        i, j = rest[ia], rest[ib]
        rest[ia] = rest[ib] = 0
        return tuple(rest), i, j

    def join(rest, i, j):
        e = list(rest)
        e[ia], e[ib] = i, j
        return tuple(e)

    return p._new(divexact_terms(p.terms, split, join))


def divided_difference(f: Polynomial, order: Sequence[int] | None = None,
                       y_name: str = "y") -> list[Polynomial]:
    """Divided differences of ``f(x)`` along the variable order ``order``.

    ``order`` is a permutation of ``0..n-1`` giving the sequence in which
    the variables are switched from ``x`` to ``y``.  Returns the list
    ``[nabla^1 f, .., nabla^n f]`` indexed by variable (not by step), over
    the context ``(x, y)``, such that
    ``f(x) - f(y) = sum_k (x_k - y_k) * nabla^k f``.
    """
    if len(f.context) != 1:
        raise ContextError("divided_difference expects a polynomial in a single family")
    xfam = f.context[0]
    n = xfam.arity
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 0..{n - 1}")
    ctx = (xfam, VarFamily(y_name, n))
    xs = [Polynomial.var(ctx, xfam.name, i) for i in range(n)]
    ys = [Polynomial.var(ctx, y_name, i) for i in range(n)]
    out: list[Polynomial | None] = [None] * n
    current = list(xs)
    before = poly_subst(f, current)
    for v in order:
        current[v] = ys[v]
        after = poly_subst(f, current)
        out[v] = divexact_linear(before - after, (xfam.name, v), (y_name, v))
        before = after
    return out  # type: ignore[return-value]
