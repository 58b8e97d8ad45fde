"""Super-commutative algebra over even variables and odd generators.

Everything in the package lives in one free super-commutative algebra
generated by

* even primal variables ``x_i`` (ordinary polynomial variables),
* even dual variables ``(x^a)_*`` (coefficient functionals, multiplied
  with the divided-power rule so that ``(x^0)_*`` is the unit),
* odd primal generators ``f_i`` (degree +1) and odd dual generators
  ``f*^i`` (degree -1).

A dual family is always named after its primal family with a trailing
``*``.  A term that carries no dual content for a dual family present in
the context stands for the trivial functional ``(x^0)_*`` / the empty
dual word, so contexts can grow without changing meaning.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from .poly import ContextError, Polynomial, VarFamily, as_fraction, grlex_key

DUAL_SUFFIX = "*"


def dual_name(name: str) -> str:
    return name + DUAL_SUFFIX


def is_dual_name(name: str) -> bool:
    return name.endswith(DUAL_SUFFIX)


def primal_name(name: str) -> str:
    return name[:-1] if is_dual_name(name) else name


@dataclass(frozen=True)
class OddFamily:
    """Anticommuting generators ``name^1 .. name^arity``.

    Dual families (``dual_of`` set) have degree -1, primal ones +1.
    """

    name: str
    arity: int
    dual_of: str | None = None

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if self.dual_of is not None and self.name != dual_name(self.dual_of):
            raise ValueError(f"dual family of {self.dual_of!r} must be named {dual_name(self.dual_of)!r}")

    @property
    def is_dual(self) -> bool:
        return self.dual_of is not None

    def dual(self) -> "OddFamily":
        if self.is_dual:
            raise ValueError("already a dual family")
        return OddFamily(dual_name(self.name), self.arity, self.name)


def even_dual(fam: VarFamily) -> VarFamily:
    if fam.dual_of is not None:
        raise ValueError("already a dual family")
    return VarFamily(dual_name(fam.name), fam.arity, fam.name)


def odd(name: str, arity: int) -> OddFamily:
    """Odd family by name; a trailing ``*`` makes it the dual family."""
    if is_dual_name(name):
        return OddFamily(name, arity, primal_name(name))
    return OddFamily(name, arity)


def even(name: str, arity: int) -> VarFamily:
    if is_dual_name(name):
        return VarFamily(name, arity, primal_name(name))
    return VarFamily(name, arity)


class Context:
    """Ordered even and odd families; fixes the layout of terms.

    Even exponents are concatenated in family order.  Odd generators get
    global ids in (family order, index) order, which is the canonical
    order of wedge words.
    """

    __slots__ = ("evens", "odds", "even_offset", "odd_offset", "nevars", "nodd",
                 "gen_family", "gen_index", "gen_dual", "even_dual_pos", "_hash")

    def __init__(self, evens: Iterable[VarFamily] = (), odds: Iterable[OddFamily] = ()):
        self.evens = tuple(evens)
        self.odds = tuple(odds)
        names = [f.name for f in self.evens] + [f.name for f in self.odds]
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate family names in {names}")
        self.even_offset, pos = {}, 0
        dual_pos = []
        for fam in self.evens:
            self.even_offset[fam.name] = pos
            dual_pos += [fam.dual_of is not None] * fam.arity
            pos += fam.arity
        self.nevars = pos
        self.even_dual_pos = tuple(i for i, d in enumerate(dual_pos) if d)
        self.odd_offset, pos = {}, 0
        fam_of, idx_of, dual_of = [], [], []
        for k, fam in enumerate(self.odds):
            self.odd_offset[fam.name] = pos
            fam_of += [k] * fam.arity
            idx_of += list(range(fam.arity))
            dual_of += [fam.is_dual] * fam.arity
            pos += fam.arity
        self.nodd = pos
        self.gen_family = tuple(fam_of)
        self.gen_index = tuple(idx_of)
        self.gen_dual = tuple(dual_of)
        self._hash = hash((self.evens, self.odds))

    # lookups ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Context) and self.evens == other.evens and self.odds == other.odds

    def __hash__(self):
        return self._hash

    def __repr__(self):
        ev = ", ".join(f"{f.name}[{f.arity}]" for f in self.evens)
        od = ", ".join(f"{f.name}[{f.arity}]" for f in self.odds)
        return f"Context(evens=({ev}), odds=({od}))"

    def family(self, name: str):
        for fam in self.evens + self.odds:
            if fam.name == name:
                return fam
        return None

    def has(self, name: str) -> bool:
        return name in self.even_offset or name in self.odd_offset

    def is_odd(self, name: str) -> bool:
        return name in self.odd_offset

    def names(self) -> list[str]:
        return [f.name for f in self.evens] + [f.name for f in self.odds]

    def even_pos(self, name: str, index: int) -> int:
        fam = self.family(name)
        if fam is None or name not in self.even_offset:
            raise ContextError(f"no even family {name!r} in context")
        if not 0 <= index < fam.arity:
            raise IndexError(f"{name}[{index}] out of range")
        return self.even_offset[name] + index

    def gen_id(self, name: str, index: int) -> int:
        fam = self.family(name)
        if fam is None or name not in self.odd_offset:
            raise ContextError(f"no odd family {name!r} in context")
        if not 0 <= index < fam.arity:
            raise IndexError(f"{name}^{index + 1} out of range")
        return self.odd_offset[name] + index

    def gen_name(self, gid: int) -> tuple[str, int]:
        return self.odds[self.gen_family[gid]].name, self.gen_index[gid]

    def word_degree(self, word: Sequence[int]) -> int:
        return sum(-1 if self.gen_dual[g] else 1 for g in word)

    # construction -----------------------------------------------------
    def union(self, other: "Context") -> "Context":
        if other == self:
            return self
        evens, odds = list(self.evens), list(self.odds)
        for fam in other.evens:
            mine = self.family(fam.name)
            if mine is None:
                evens.append(fam)
            elif mine != fam:
                raise ContextError(f"family {fam.name!r} declared twice with different shape")
        for fam in other.odds:
            mine = self.family(fam.name)
            if mine is None:
                odds.append(fam)
            elif mine != fam:
                raise ContextError(f"family {fam.name!r} declared twice with different shape")
        return Context(evens, odds)

    def without(self, names: Iterable[str]) -> "Context":
        drop = set(names)
        return Context([f for f in self.evens if f.name not in drop],
                       [f for f in self.odds if f.name not in drop])

    def with_duals(self, names: Iterable[str]) -> "Context":
        """Context with the dual families of the named primal families added."""
        extra_e, extra_o = [], []
        for name in names:
            fam = self.family(name)
            if fam is None or self.has(dual_name(name)):
                continue
            if isinstance(fam, OddFamily):
                extra_o.append(fam.dual())
            else:
                extra_e.append(even_dual(fam))
        if not extra_e and not extra_o:
            return self
        return Context(self.evens + tuple(extra_e), self.odds + tuple(extra_o))


EMPTY = Context()


def sort_word(seq: Sequence[int]) -> tuple[int, tuple]:
    """Sort a list of generator ids, returning ``(sign, word)``.

    ``sign`` is 0 when a generator repeats (the product vanishes).
    """
    items = list(seq)
    sign = 1
    for i in range(1, len(items)):
        v = items[i]
        j = i
        while j > 0 and items[j - 1] > v:
            items[j] = items[j - 1]
            j -= 1
            sign = -sign
        if j > 0 and items[j - 1] == v:
            return 0, ()
        items[j] = v
    return sign, tuple(items)


def merge_words(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Product of two sorted words as ``(sign, sorted word)``."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    inv = 0
    for g in a:
        k = bisect_left(b, g)
        if k < len(b) and b[k] == g:
            return 0, ()
        inv += k
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


def _perm_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    inv = 0
    n = len(seq)
    for i in range(n):
        for j in range(i + 1, n):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv & 1 else 1


def pair_sequences(dual_keys: Sequence, primal_keys: Sequence) -> int:
    """Pairing of a dual word with a primal word given as key sequences.

    Keys identify generators across the two polarities.  The value is 0
    unless both words use the same generators; otherwise it is
    ``(-1)^(r(r-1)/2)`` times the sign of the permutation aligning them.
    This is the rule obtained by letting the dual word act by nested
    interior derivatives, rightmost first.
    """
    r = len(dual_keys)
    if r != len(primal_keys):
        return 0
    if r == 0:
        return 1
    pos = {k: i for i, k in enumerate(primal_keys)}
    try:
        perm = [pos[k] for k in dual_keys]
    except KeyError:
        return 0
    if len(set(perm)) != r:
        return 0
    sign = _perm_sign(perm)
    return -sign if (r * (r - 1) // 2) & 1 else sign


def word_pairing_sign(r: int) -> int:
    """Pairing of a sorted dual word with its sorted primal word."""
    return -1 if (r * (r - 1) // 2) & 1 else 1


class Multivector:
    """Finite sum of ``coef * even monomial * wedge word`` over a Context.

    ``terms`` maps ``(exponent tuple, sorted word tuple)`` to a nonzero
    ``Fraction``.  Instances are treated as immutable values.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping | None = None, *, _trusted=False):
        self.ctx = ctx
        if _trusted:
            self.terms = terms if terms is not None else {}
            return
        clean: dict = {}
        for (exps, word), c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != ctx.nevars:
                raise ContextError("exponent vector does not match context")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            sign, word = sort_word(word)
            c = as_fraction(c) * sign
            if c:
                v = clean.get((exps, word), 0) + c
                if v:
                    clean[(exps, word)] = v
                else:
                    clean.pop((exps, word), None)
        self.terms = clean

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ctx: Context = EMPTY):
        return cls(ctx, {}, _trusted=True)

    @classmethod
    def scalar(cls, c, ctx: Context = EMPTY):
        c = as_fraction(c)
        if not c:
            return cls.zero(ctx)
        return cls(ctx, {((0,) * ctx.nevars, ()): c}, _trusted=True)

    @classmethod
    def var(cls, ctx: Context, name: str, index: int, power: int = 1):
        """Even variable ``name_index`` (0-based), optionally raised to ``power``."""
        exps = [0] * ctx.nevars
        exps[ctx.even_pos(name, index)] = power
        return cls(ctx, {(tuple(exps), ()): Fraction(1)}, _trusted=True)

    @classmethod
    def gen(cls, ctx: Context, name: str, index: int):
        """Odd generator ``name^(index+1)``."""
        return cls(ctx, {((0,) * ctx.nevars, (ctx.gen_id(name, index),)): Fraction(1)}, _trusted=True)

    @classmethod
    def monomial(cls, ctx: Context, evens: Mapping[str, Sequence[int]] | None = None,
                 word: Sequence[tuple[str, int]] = (), coef=1):
        """Build ``coef * prod x^a * w`` from family-keyed exponents and a word."""
        exps = [0] * ctx.nevars
        for name, ex in (evens or {}).items():
            fam = ctx.family(name)
            if fam is None or name not in ctx.even_offset:
                raise ContextError(f"no even family {name!r} in context")
            if len(ex) != fam.arity:
                raise ContextError(f"exponent list for {name!r} has wrong length")
            off = ctx.even_offset[name]
            for i, e in enumerate(ex):
                exps[off + i] = e
        ids = [ctx.gen_id(n, i) for n, i in word]
        return cls(ctx, {(tuple(exps), tuple(ids)): coef})

    @classmethod
    def from_poly(cls, p: Polynomial, ctx: Context | None = None):
        """Embed a polynomial; its families become even families of the context."""
        base = Context(p.context, ())
        ctx = base if ctx is None else ctx.union(base)
        out = cls(base, {(e, ()): c for e, c in p.terms.items()}, _trusted=True)
        return out.to(ctx)

    # context handling -------------------------------------------------
    def to(self, ctx: Context) -> "Multivector":
        """Re-express in a context containing every family actually used."""
        if ctx == self.ctx:
            return self
        src = self.ctx
        epos = []
        for fam in src.evens:
            if ctx.has(fam.name) and fam.name in ctx.even_offset:
                tgt = ctx.family(fam.name)
                if tgt != fam:
                    raise ContextError(f"family {fam.name!r} has a different shape in target context")
                off = ctx.even_offset[fam.name]
                epos += [off + i for i in range(fam.arity)]
            else:
                epos += [None] * fam.arity
        gmap = []
        for fam in src.odds:
            if fam.name in ctx.odd_offset:
                if ctx.family(fam.name) != fam:
                    raise ContextError(f"family {fam.name!r} has a different shape in target context")
                off = ctx.odd_offset[fam.name]
                gmap += [off + i for i in range(fam.arity)]
            else:
                gmap += [None] * fam.arity
        out: dict = {}
        nv = ctx.nevars
        for (exps, word), c in self.terms.items():
            new = [0] * nv
            for i, e in enumerate(exps):
                if e:
                    p = epos[i]
                    if p is None:
                        raise ContextError(f"term uses a family missing from {ctx}")
                    new[p] = e
            ids = []
            for g in word:
                h = gmap[g]
                if h is None:
                    raise ContextError(f"term uses a family missing from {ctx}")
                ids.append(h)
            sign, w = sort_word(ids)
            key = (tuple(new), w)
            v = out.get(key, 0) + sign * c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return Multivector(ctx, out, _trusted=True)

    def used_families(self) -> set[str]:
        used = set()
        ctx = self.ctx
        for (exps, word) in self.terms:
            for fam in ctx.evens:
                off = ctx.even_offset[fam.name]
                if any(exps[off:off + fam.arity]):
                    used.add(fam.name)
            for g in word:
                used.add(ctx.odds[ctx.gen_family[g]].name)
        return used

    def trimmed(self) -> "Multivector":
        """Drop families not used by any term."""
        used = self.used_families()
        return self.to(Context([f for f in self.ctx.evens if f.name in used],
                               [f for f in self.ctx.odds if f.name in used]))

    def rename(self, mapping: Mapping[str, str]) -> "Multivector":
        """Rename families (duals follow their primal family automatically)."""
        full = dict(mapping)
        for old, new in mapping.items():
            full.setdefault(dual_name(old), dual_name(new))

        def ren(fam):
            new = full.get(fam.name)
            if new is None:
                return fam
            if isinstance(fam, OddFamily):
                return odd(new, fam.arity)
            return even(new, fam.arity)

        ctx = Context([ren(f) for f in self.ctx.evens], [ren(f) for f in self.ctx.odds])
        return Multivector(ctx, self.terms, _trusted=True)

    def _aligned(self, other):
        if not isinstance(other, Multivector):
            return self, Multivector.scalar(other, self.ctx)
        if other.ctx == self.ctx:
            return self, other
        ctx = self.ctx.union(other.ctx)
        return self.to(ctx), other.to(ctx)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b = self._aligned(other)
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Multivector(a.ctx, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.ctx, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Multivector":
        c = as_fraction(c)
        if not c:
            return Multivector.zero(self.ctx)
        return Multivector(self.ctx, {k: v * c for k, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, Multivector):
            return self.scale(other)
        return wedge_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Multivector.scalar(other, self.ctx)
        if not isinstance(other, Multivector):
            return NotImplemented
        try:
            return not (self - other).terms
        except ContextError:
            return False

    def __hash__(self):
        return hash(frozenset(self.trimmed().terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        from .textio import format_multivector
        return format_multivector(self)

    # grading ----------------------------------------------------------
    def degrees(self) -> set[int]:
        return {self.ctx.word_degree(w) for (_, w) in self.terms}

    def degree(self) -> int:
        """f-degree of a homogeneous element (0 for zero)."""
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element with degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def parity(self) -> int:
        pars = {len(w) & 1 for (_, w) in self.terms}
        if len(pars) > 1:
            raise ValueError("element has mixed parity")
        return pars.pop() if pars else 0

    def homogeneous_part(self, deg: int) -> "Multivector":
        return Multivector(self.ctx, {k: c for k, c in self.terms.items()
                                      if self.ctx.word_degree(k[1]) == deg}, _trusted=True)

    def is_scalar(self) -> bool:
        return all(not w and not any(e) for (e, w) in self.terms)

    def scalar_value(self) -> Fraction:
        if not self.is_scalar():
            raise ValueError("element is not a scalar")
        return sum(self.terms.values(), Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0][1]), t[0][1], grlex_key(t[0][0])))

    def poly_degree(self) -> int:
        return max((sum(e) for (e, _) in self.terms), default=-1)


def wedge_mul(a: Multivector, b: Multivector) -> Multivector:
    """Product in the super-commutative algebra."""
    if a.ctx != b.ctx:
        a, b = a._aligned(b)
    ctx = a.ctx
    dual_pos = ctx.even_dual_pos
    out: dict = {}
    for (ea, wa), ca in a.terms.items():
        for (eb, wb), cb in b.terms.items():
            sign, w = merge_words(wa, wb)
            if not sign:
                continue
            c = ca * cb * sign
            for p in dual_pos:
                if ea[p] and eb[p]:
                    c *= comb(ea[p] + eb[p], ea[p])
            key = (tuple(x + y for x, y in zip(ea, eb)), w)
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return Multivector(ctx, out, _trusted=True)


def product(factors: Iterable[Multivector], ctx: Context = EMPTY) -> Multivector:
    result = Multivector.scalar(1, ctx)
    for f in factors:
        result = result * f
    return result


# contractions ---------------------------------------------------------

def _family_names(families) -> list[str]:
    if isinstance(families, str):
        families = [families]
    out = []
    for name in families:
        name = primal_name(name)
        if name not in out:
            out.append(name)
    return out


class _Split:
    """Precomputed classification of a context for contracting over F."""

    def __init__(self, ctx: Context, names: list[str]):
        self.ctx = ctx
        fset = set(names) | {dual_name(n) for n in names}
        self.even_pairs = []  # (dual position or None, primal position or None)
        for name in names:
            fam = ctx.family(name) or ctx.family(dual_name(name))
            if fam is None or isinstance(fam, OddFamily):
                continue
            ppos = ctx.even_offset.get(name)
            dpos = ctx.even_offset.get(dual_name(name))
            for i in range(fam.arity):
                self.even_pairs.append((None if dpos is None else dpos + i,
                                        None if ppos is None else ppos + i))
        # group per generator: 0 spectator, 1 F-dual, 2 F-primal; key pairs them
        self.group = []
        self.key = []
        rank = {n: k for k, n in enumerate(names)}
        for g in range(ctx.nodd):
            fam = ctx.odds[ctx.gen_family[g]]
            if fam.name not in fset:
                self.group.append(0)
                self.key.append(None)
            else:
                self.group.append(1 if fam.is_dual else 2)
                self.key.append((rank[primal_name(fam.name)], ctx.gen_index[g]))
        self.spec_evens = [i for f in ctx.evens if f.name not in fset
                           for i in range(ctx.even_offset[f.name], ctx.even_offset[f.name] + f.arity)]
        self.fset = fset

    def split_word(self, word):
        """Return ``(sign, spectators, dual keys, primal keys)``."""
        group = self.group
        inv = 0
        seen = [0, 0, 0]
        spect, duals, prims = [], [], []
        for g in word:
            gr = group[g]
            # count earlier generators of a larger group
            inv += sum(seen[gr + 1:])
            seen[gr] += 1
            if gr == 0:
                spect.append(g)
            elif gr == 1:
                duals.append(self.key[g])
            else:
                prims.append(self.key[g])
        return (-1 if inv & 1 else 1), spect, duals, prims


def _spectator_context(ctx: Context, fset) -> Context:
    return ctx.without(fset)


def _remap(ctx_from: Context, ctx_to: Context):
    epos = {}
    for fam in ctx_from.evens:
        if fam.name in ctx_to.even_offset:
            a, b = ctx_from.even_offset[fam.name], ctx_to.even_offset[fam.name]
            for i in range(fam.arity):
                epos[a + i] = b + i
    gmap = {}
    for fam in ctx_from.odds:
        if fam.name in ctx_to.odd_offset:
            a, b = ctx_from.odd_offset[fam.name], ctx_to.odd_offset[fam.name]
            for i in range(fam.arity):
                gmap[a + i] = b + i
    return epos, gmap


def contract_top(c: Multivector, families) -> Multivector:
    """Full pairing of the F-dual content of ``c`` with its F-primal content.

    ``families`` names primal families (even or odd).  Each term is first
    reordered as spectators * F-duals * F-primals; the result keeps the
    spectators multiplied by the pairing value.  Both the primal and the
    dual families of F disappear from the context.
    """
    names = _family_names(families)
    ctx = c.ctx
    sp = _Split(ctx, names)
    out_ctx = _spectator_context(ctx, sp.fset)
    epos, gmap = _remap(ctx, out_ctx)
    nv = out_ctx.nevars
    out: dict = {}
    for (exps, word), coef in c.terms.items():
        ok = True
        for dpos, ppos in sp.even_pairs:
            a = exps[dpos] if dpos is not None else 0
            b = exps[ppos] if ppos is not None else 0
            if a != b:
                ok = False
                break
        if not ok:
            continue
        sign, spect, duals, prims = sp.split_word(word)
        val = pair_sequences(duals, prims)
        if not val:
            continue
        new = [0] * nv
        for i in sp.spec_evens:
            if exps[i]:
                new[epos[i]] = exps[i]
        key = (tuple(new), tuple(gmap[g] for g in spect))
        v = out.get(key, 0) + coef * sign * val
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Multivector(out_ctx, out, _trusted=True)


def contract_left(c: Multivector, families) -> Multivector:
    """Partial contraction: the functional ``b -> (F-dual part).(F-primal part * b)``.

    The F-primal families disappear; the F-dual families remain and carry
    the residual functional.  Spectators are kept in front.
    """
    names = _family_names(families)
    ctx = c.ctx
    out_ctx = ctx.with_duals(names).without(names)
    # make sure dual families exist in the working context as well
    work = ctx.union(out_ctx)
    if work != ctx:
        c = c.to(work)
        ctx = work
    sp = _Split(ctx, names)
    epos, gmap = _remap(ctx, out_ctx)
    spect_pos = [i for i in range(ctx.nevars) if i in epos]
    paired_dual = {d for d, _ in sp.even_pairs if d is not None}
    # dual generator id in the output for each key
    key_to_dual = {}
    for name in names:
        dn = dual_name(name)
        if dn in out_ctx.odd_offset:
            fam = out_ctx.family(dn)
            r = names.index(name)
            for i in range(fam.arity):
                key_to_dual[(r, i)] = out_ctx.odd_offset[dn] + i
    nv = out_ctx.nevars
    out: dict = {}
    for (exps, word), coef in c.terms.items():
        new = [0] * nv
        ok = True
        for dpos, ppos in sp.even_pairs:
            a = exps[dpos]
            b = exps[ppos] if ppos is not None else 0
            if a < b:
                ok = False
                break
            new[epos[dpos]] = a - b
        if not ok:
            continue
        for i in spect_pos:
            if i not in paired_dual and exps[i]:
                new[epos[i]] = exps[i]
        sign, spect, duals, prims = sp.split_word(word)
        pset = set(prims)
        if len(pset) != len(prims) or not pset <= set(duals):
            continue
        rest = [k for k in duals if k not in pset]  # W, in dual order
        val = pair_sequences(duals, prims + rest)
        if not val:
            continue
        val *= word_pairing_sign(len(rest))
        sgn, w = merge_words(tuple(gmap[g] for g in spect), tuple(sorted(key_to_dual[k] for k in rest)))
        if not sgn:
            continue
        # rest is already in dual order, so sorting it introduced no sign
        key = (tuple(new), w)
        v = out.get(key, 0) + coef * sign * val * sgn
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Multivector(out_ctx, out, _trusted=True)


def dual_pair(a: Multivector, c: Multivector) -> Multivector:
    """Pair a dual element ``a`` against a primal element ``c``.

    Every dual family of ``a`` must have its primal family in ``c``; the
    result is the contraction of ``a * c`` over those families.
    """
    fams = []
    for fam in a.ctx.evens + a.ctx.odds:
        if is_dual_name(fam.name):
            p = primal_name(fam.name)
            if not c.ctx.has(p):
                raise ContextError(f"dual family {fam.name!r} has no partner in the argument")
            fams.append(p)
    return contract_top(a * c, fams)


# substitution -----------------------------------------------------------

def subst_morphism(c: Multivector, images: Mapping[str, Sequence]) -> Multivector:
    """Algebra morphism replacing the generators of the named families.

    ``images[name]`` lists one image per variable/generator of family
    ``name``.  Even families need even degree-0 images, odd families need
    odd images.  Families that are not named map to themselves.
    """
    ctx = c.ctx
    imgs: dict[str, list[Multivector]] = {}
    target = ctx.without(images.keys())
    for name, vals in images.items():
        fam = ctx.family(name)
        if fam is None:
            continue
        vals = [v if isinstance(v, Multivector) else Multivector.scalar(v) for v in vals]
        if len(vals) != fam.arity:
            raise ContextError(f"family {name!r} needs {fam.arity} images, got {len(vals)}")
        want = 1 if isinstance(fam, OddFamily) else 0
        for v in vals:
            if v and v.parity() != want:
                raise ValueError(f"image for {name!r} has the wrong parity")
            if v and want == 0 and v.degree() != 0:
                raise ValueError(f"image for even family {name!r} must have degree 0")
            target = target.union(v.ctx)
        imgs[name] = [v.to(target) for v in vals]
    # images of every slot of the source context
    even_img = []
    for fam in ctx.evens:
        if fam.name in imgs:
            even_img += imgs[fam.name]
        else:
            even_img += [Multivector.var(target, fam.name, i) for i in range(fam.arity)]
    odd_img = []
    for fam in ctx.odds:
        if fam.name in imgs:
            odd_img += imgs[fam.name]
        else:
            odd_img += [Multivector.gen(target, fam.name, i) for i in range(fam.arity)]
    powers: dict = {}

    def power(i, k):
        if (i, k) not in powers:
            p = Multivector.scalar(1, target)
            for _ in range(k):
                p = p * even_img[i]
            if i in ctx.even_dual_pos:
                # divided powers: (x_*)^k = k! (x^k)_*, undo the factorial
                p = p.scale(Fraction(1, factorial(k)))
            powers[(i, k)] = p
        return powers[(i, k)]

    result = Multivector.zero(target)
    for (exps, word), coef in c.terms.items():
        term = Multivector.scalar(coef, target)
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        for g in word:
            term = term * odd_img[g]
        result = result + term
    return result


# exponential determinant --------------------------------------------------

def fresh_name(ctx: Context, base: str = "p") -> str:
    """First of ``base, base1, base2, ..`` unused in ``ctx`` (with its dual)."""
    k = 0
    while True:
        name = base if k == 0 else f"{base}{k}"
        if not ctx.has(name) and not ctx.has(dual_name(name)):
            return name
        k += 1


def _as_mv(v) -> Multivector:
    return v if isinstance(v, Multivector) else Multivector.scalar(v)


def exp_det(top: Sequence, bottom: Sequence, aux: str | None = None) -> Multivector:
    """Exponential determinant of odd rows.

    Rows come in two forms.  A pair ``(B, coeffs)`` means the row
    ``B + sum_j coeffs[j] * p*^j`` for a top row and
    ``B + sum_j p^j * coeffs[j]`` for a bottom row, where ``p`` is an
    auxiliary odd family (fresh unless ``aux`` is given).  A bare
    multivector is used as is; with only bare rows, ``aux`` names an
    existing family to contract over.

    Top rows are multiplied in reverse order, then the bottom rows in
    order, and the product is contracted over the auxiliary family.
    """
    top, bottom = list(top), list(bottom)
    if not top and not bottom:
        return Multivector.scalar(1)
    coeff_form = any(isinstance(r, tuple) for r in top + bottom)
    ctx = EMPTY
    width = 0
    for r in top + bottom:
        if isinstance(r, tuple):
            b, coeffs = r
            ctx = ctx.union(_as_mv(b).ctx)
            for v in coeffs:
                ctx = ctx.union(_as_mv(v).ctx)
            width = max(width, len(coeffs))
        else:
            ctx = ctx.union(_as_mv(r).ctx)
    if coeff_form:
        if aux is None:
            aux = fresh_name(ctx)
        elif ctx.has(aux) or ctx.has(dual_name(aux)):
            raise ContextError(f"auxiliary family {aux!r} collides with the row context")
        pfam = OddFamily(aux, width)
        wctx = ctx.union(Context((), (pfam, pfam.dual())))
    else:
        if aux is not None and not (ctx.has(aux) or ctx.has(dual_name(aux))):
            raise ContextError(f"auxiliary family {aux!r} not present in rows")
        wctx = ctx

    def build(row, is_top):
        if not isinstance(row, tuple):
            row = (row, [])
        b, coeffs = row
        b = _as_mv(b).to(wctx)
        if b and b.parity() != 1:
            raise ValueError("exponential determinant rows must be odd")
        acc = b
        for j, v in enumerate(coeffs):
            v = _as_mv(v)
            if v and v.parity() != 0:
                raise ValueError("auxiliary coefficients must be even")
            g = Multivector.gen(wctx, dual_name(aux) if is_top else aux, j)
            acc = acc + (v.to(wctx) * g if is_top else g * v.to(wctx))
        return acc

    rows = [build(r, True) for r in reversed(top)] + [build(r, False) for r in bottom]
    prod = Multivector.scalar(1, wctx)
    for r in rows:
        prod = prod * r
    if aux is None:
        return prod
    return contract_top(prod, [aux])


def matrix_det(matrix: Sequence[Sequence]) -> Multivector:
    """Determinant of a square matrix of even entries via :func:`exp_det`."""
    m = len(matrix)
    if m == 0:
        return Multivector.scalar(1)
    unit = [[Multivector.scalar(-1 if i == k else 0) for k in range(m)] for i in range(m)]
    top = [(0, unit[k]) for k in range(m)]
    bottom = [(0, [-_as_mv(v) for v in row]) for row in matrix]
    return exp_det(top, bottom)
