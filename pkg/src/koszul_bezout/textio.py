"""Parsing and canonical printing of systems and multivectors.

System files look like::

    # comment
    vars x y
    f1 = x^2 - 1
    f2 = 3/2*x*y + y^2
    order = 2,1
    degree = 4

Lines may also be separated by ``;``.  Multivector terms are products of
a rational coefficient, even variables ``x^2``, dual monomials
``(x1^2*x2)_*`` and odd generators ``fx^1`` / dual generators ``fx*^1``;
a wedge word may be chained as ``fx^1^fy^2``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .grassmann import Context, Multivector, OddFamily, is_dual_name, primal_name
from .poly import Polynomial, VarFamily, grlex_key


class ParseError(ValueError):
    """Syntax or name error with a 1-based line and column."""

    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z][A-Za-z0-9_']*)|(?P<op>[-+*/^()_,=]))")


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col)
        kind = m.lastgroup
        toks.append(Token(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return toks


# naming -------------------------------------------------------------------

EVEN_COPIES = {"x": "x", "y": "y", "z": "z", "xp": "x"}


def _copy_names(base: list[str], letter: str, taken: set[str], primes: int) -> list[str]:
    cands = []
    if letter and all(n.startswith("x") for n in base):
        cands.append([letter + n[1:] for n in base])
    cands.append([n + "'" * primes for n in base])
    for names in cands:
        if not (set(names) & taken) and len(set(names)) == len(names):
            return names
    k = primes + 1
    while True:
        names = [n + "'" * k for n in base]
        if not set(names) & taken:
            return names
        k += 1


@dataclass
class Namer:
    """Display names for every family used by the library.

    ``var_names`` are the user's names for ``x_1..x_n``; copies ``y``,
    ``z`` and ``xp`` are derived from them without collisions.
    """

    var_names: tuple
    nfuncs: int = 0
    short_f: bool = False
    even: dict = field(default_factory=dict)
    odd: dict = field(default_factory=dict)

    def __post_init__(self):
        base = list(self.var_names)
        taken = set(base)
        self.even = {"x": base}
        for fam, letter, primes in (("y", "y", 1), ("z", "z", 2), ("xp", None, 1)):
            names = _copy_names(base, letter, taken, primes)
            self.even[fam] = names
            taken |= set(names)
        odd_pref = {"fx": "f" if self.short_f else "fx", "fy": "fy", "fz": "fz",
                    "u": "u", "up": "u'", "p": "p"}
        for fam, disp in odd_pref.items():
            while disp in taken:
                disp += "_"
            self.odd[fam] = disp
            taken.add(disp)

    @classmethod
    def default(cls, n: int, nfuncs: int = 0, short_f: bool = False):
        names = ("x",) if n == 1 else tuple(f"x{i + 1}" for i in range(n))
        return cls(names, nfuncs, short_f)

    def even_names(self, fam: VarFamily) -> list[str]:
        base = primal_name(fam.name)
        if base in self.even and len(self.even[base]) == fam.arity:
            return self.even[base]
        if fam.arity == 1:
            return [base]
        return [f"{base}{i + 1}" for i in range(fam.arity)]

    def odd_name(self, fam: OddFamily) -> str:
        base = primal_name(fam.name)
        return self.odd.get(base, base)

    def lookup(self, ctx: Context):
        """Name tables for parsing in ``ctx``."""
        evens = {}
        for fam in ctx.evens:
            if is_dual_name(fam.name):
                continue
            for i, nm in enumerate(self.even_names(fam)):
                evens[nm] = (fam.name, i)
        duals = {}
        for fam in ctx.evens:
            if is_dual_name(fam.name):
                pf = VarFamily(primal_name(fam.name), fam.arity)
                for i, nm in enumerate(self.even_names(pf)):
                    duals[nm] = (fam.name, i)
        odds = {}
        for fam in ctx.odds:
            nm = self.odd_name(fam)
            odds[nm + ("*" if fam.is_dual else "")] = fam.name
            if fam.name in ("fx", "fx*") and not self.short_f:
                odds["f" + ("*" if fam.is_dual else "")] = fam.name
            if fam.name in ("fx", "fx*") and self.short_f:
                odds["fx" + ("*" if fam.is_dual else "")] = fam.name
        return evens, duals, odds


# printing -------------------------------------------------------------------

def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_multivector(m: Multivector, namer: Namer | None = None) -> str:
    """Canonical text: terms by word then graded-lex monomial."""
    ctx = m.ctx
    if namer is None:
        namer = _namer_for(ctx)
    if not m.terms:
        return "0"
    even_names = []
    for fam in ctx.evens:
        base = VarFamily(primal_name(fam.name), fam.arity)
        even_names.append((fam, namer.even_names(base)))
    gen_names = []
    for fam in ctx.odds:
        nm = namer.odd_name(fam) + ("*" if fam.is_dual else "")
        gen_names += [f"{nm}^{i + 1}" for i in range(fam.arity)]
    pieces = []
    for (exps, word), c in _canonical_terms(m):
        factors = []
        duals = []
        for fam, names in even_names:
            off = ctx.even_offset[fam.name]
            parts = []
            for i, nm in enumerate(names):
                e = exps[off + i]
                if e:
                    parts.append(nm if e == 1 else f"{nm}^{e}")
            if not parts:
                continue
            if is_dual_name(fam.name):
                duals.append("(" + "*".join(parts) + ")_*")
            else:
                factors.extend(parts)
        body = "*".join(factors)
        for d in duals:
            body = f"{body}*{d}" if body else d
        if word:
            w = "^".join(gen_names[g] for g in word)
            body = f"{body} {w}" if body.endswith("_*") else (f"{body}*{w}" if body else w)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not body:
            text = _fmt_coef(a)
        elif a == 1:
            text = body
        else:
            text = f"{_fmt_coef(a)}*{body}"
        pieces.append((sign, text))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out


def _canonical_terms(m: Multivector):
    ctx = m.ctx
    # order terms independently of family declaration order: by family name
    order_e = sorted(range(len(ctx.evens)), key=lambda k: ctx.evens[k].name)
    perm_e = [ctx.even_offset[ctx.evens[k].name] + i for k in order_e for i in range(ctx.evens[k].arity)]

    def key(item):
        (exps, word), _ = item
        names = tuple(ctx.gen_name(g) for g in word)
        pe = tuple(exps[i] for i in perm_e)
        return (len(word), names, grlex_key(pe))

    return sorted(m.terms.items(), key=key)


def _namer_for(ctx: Context) -> Namer:
    n = 0
    for fam in ctx.evens:
        if primal_name(fam.name) in EVEN_COPIES:
            n = fam.arity
            break
    short = not any(primal_name(f.name) in ("fy", "fz") for f in ctx.odds)
    return Namer.default(max(n, 1), short_f=short)


def format_poly(p: Polynomial, names) -> str:
    ctx = Context(p.context)
    m = Multivector(ctx, {(e, ()): c for e, c in p.terms.items()}, _trusted=True)
    return format_multivector(m, Namer(tuple(names)))


# parsing ----------------------------------------------------------------

class _Parser:
    def __init__(self, toks, line, evens, duals, odds):
        self.toks = toks
        self.i = 0
        self.line = line
        self.evens, self.duals, self.odds = evens, duals, odds

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        col = tok.col if tok else (self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1)
        raise ParseError(msg, self.line, col)

    def take(self, text=None, kind=None):
        tok = self.peek()
        if tok is None or (text and tok.text != text) or (kind and tok.kind != kind):
            self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def at(self, text):
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text == text

    def nat(self):
        return int(self.take(kind="num").text)

    def rational(self):
        num = Fraction(self.nat())
        if self.at("/"):
            self.i += 1
            den = self.nat()
            if den == 0:
                self.error("zero denominator")
            num /= den
        return num

    def expr(self):
        terms = []
        sign = 1
        if self.at("+") or self.at("-"):
            sign = -1 if self.take().text == "-" else 1
        terms.append(self.term(sign))
        while self.at("+") or self.at("-"):
            sign = -1 if self.take().text == "-" else 1
            terms.append(self.term(sign))
        if self.peek() is not None:
            self.error(f"unexpected {self.peek().text!r}")
        return terms

    def term(self, sign):
        coef = Fraction(sign)
        evens: dict = {}
        word = []
        seen = False
        if self.peek() and self.peek().kind == "num":
            coef *= self.rational()
            seen = True
        while True:
            tok = self.peek()
            if tok is None or (tok.kind == "op" and tok.text in "+-"):
                break
            if seen and self.at("*"):
                self.i += 1
                tok = self.peek()
                if tok is None:
                    self.error("dangling '*'")
            if tok.kind == "op" and tok.text == "(":
                self.dual_monomial(evens)
            elif tok.kind == "id":
                self.factor(evens, word)
            elif tok.kind == "num":
                coef *= self.rational()
            else:
                self.error(f"unexpected {tok.text!r}")
            seen = True
        if not seen:
            self.error("empty term")
        return coef, evens, word

    def dual_monomial(self, evens):
        self.take("(")
        start = self.peek()
        if self.peek() and self.peek().kind == "num":
            if self.nat() != 1:
                self.error("only 1 may appear as a constant dual monomial", start)
        else:
            while True:
                tok = self.take(kind="id")
                if tok.text not in self.duals:
                    self.error(f"no dual variable for {tok.text!r}", tok)
                e = 1
                if self.at("^"):
                    self.i += 1
                    e = self.nat()
                key = self.duals[tok.text]
                evens[key] = evens.get(key, 0) + e
                if self.at("*"):
                    self.i += 1
                    continue
                break
        self.take(")")
        self.take("_")
        self.take("*")

    def factor(self, evens, word):
        tok = self.take(kind="id")
        name = tok.text
        if self.at("*") and self.peek(1) and self.peek(1).text == "^" and name + "*" in self.odds:
            self.i += 1
            fam = self.odds[name + "*"]
            self.take("^")
            word.append((fam, self.nat() - 1, tok))
        elif name in self.odds:
            fam = self.odds[name]
            self.take("^")
            word.append((fam, self.nat() - 1, tok))
        elif name in self.evens:
            e = 1
            if self.at("^"):
                self.i += 1
                e = self.nat()
            key = self.evens[name]
            evens[key] = evens.get(key, 0) + e
            return
        else:
            self.error(f"undeclared name {name!r}", tok)
        # a chained wedge word: fx^1^fy^2
        while self.at("^") and self.peek(1) is not None and self.peek(1).kind == "id":
            self.i += 1
            nxt = self.take(kind="id")
            nm = nxt.text
            if self.at("*") and self.peek(1) and self.peek(1).text == "^" and nm + "*" in self.odds:
                self.i += 1
                nm = nm + "*"
            if nm not in self.odds:
                self.error(f"undeclared generator {nm!r}", nxt)
            self.take("^")
            word.append((self.odds[nm], self.nat() - 1, nxt))


def parse_multivector(text: str, ctx: Context, namer: Namer | None = None, line: int = 1) -> Multivector:
    """Parse ``text`` as an element of ``ctx`` (names per ``namer``)."""
    namer = namer or _namer_for(ctx)
    evens, duals, odds = namer.lookup(ctx)
    toks = tokenize(text, line)
    if not toks:
        raise ParseError("empty expression", line, 1)
    p = _Parser(toks, line, evens, duals, odds)
    result = Multivector.zero(ctx)
    for coef, ev, word in p.expr():
        exps = [0] * ctx.nevars
        for (fam, i), e in ev.items():
            exps[ctx.even_offset[fam] + i] += e
        ids = []
        for fam, i, tok in word:
            f = ctx.family(fam)
            if not 0 <= i < f.arity:
                raise ParseError(f"generator index {i + 1} out of range", line, tok.col)
            ids.append(ctx.odd_offset[fam] + i)
        result = result + Multivector(ctx, {(tuple(exps), tuple(ids)): coef})
    return result


def parse_polynomial(text: str, names, line: int = 1) -> Polynomial:
    fam = VarFamily("x", len(names))
    ctx = Context((fam,))
    m = parse_multivector(text, ctx, Namer(tuple(names)), line)
    return Polynomial((fam,), {e: c for (e, _), c in m.terms.items()})


# systems -----------------------------------------------------------------

@dataclass
class SystemFile:
    """A parsed system plus the options it carried."""

    system: object
    degree: int | None = None
    seed: int | None = None


def _split_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        col = 0
        for part in body.split(";"):
            if part.strip():
                yield lineno, col, part
            col += len(part) + 1


def parse_system_file(text: str) -> SystemFile:
    from .bezout import PolySystem

    names = None
    defs: dict[int, Polynomial] = {}
    order = None
    degree = seed = None
    for lineno, col, part in _split_lines(text):
        stripped = part.strip()
        offset = col + len(part) - len(part.lstrip())
        if stripped.startswith("vars ") or stripped == "vars":
            if names is not None:
                raise ParseError("duplicate vars declaration", lineno, offset + 1)
            names = stripped.split()[1:]
            for nm in names:
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", nm):
                    raise ParseError(f"bad variable name {nm!r}", lineno, offset + 1)
            if len(set(names)) != len(names):
                raise ParseError("repeated variable name", lineno, offset + 1)
            continue
        if "=" not in stripped:
            raise ParseError("expected 'vars ...' or 'name = ...'", lineno, offset + 1)
        lhs, rhs = stripped.split("=", 1)
        lhs = lhs.strip()
        rhs_col = offset + part.lstrip().index("=") + 2
        if lhs in ("order", "degree", "seed"):
            try:
                if lhs == "order":
                    order = tuple(int(v) - 1 for v in rhs.split(","))
                elif lhs == "degree":
                    degree = int(rhs)
                else:
                    seed = int(rhs)
            except ValueError:
                raise ParseError(f"bad value for {lhs}", lineno, rhs_col) from None
            continue
        m = re.fullmatch(r"f(\d+)", lhs)
        if not m:
            raise ParseError(f"unknown definition {lhs!r}", lineno, offset + 1)
        if names is None:
            raise ParseError("polynomial defined before 'vars'", lineno, offset + 1)
        idx = int(m.group(1))
        if idx in defs:
            raise ParseError(f"duplicate definition of {lhs}", lineno, offset + 1)
        try:
            defs[idx] = parse_polynomial(rhs, names, lineno)
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[1], lineno, exc.col + rhs_col - 1) from None
    if names is None:
        raise ParseError("missing 'vars' declaration", 1, 1)
    if sorted(defs) != list(range(1, len(defs) + 1)):
        raise ParseError("polynomials must be numbered f1..fs without gaps", 1, 1)
    polys = [defs[i] for i in sorted(defs)]
    fam = VarFamily("x", len(names))
    polys = [Polynomial((fam,), p.terms) for p in polys]
    try:
        sys = PolySystem(polys, n=len(names), order=order, names=names)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None
    return SystemFile(sys, degree, seed)


def parse_system(text: str):
    return parse_system_file(text).system


def serialize_system(sys, degree: int | None = None, seed: int | None = None) -> str:
    lines = ["vars " + " ".join(sys.names)]
    for i, p in enumerate(sys.f):
        lines.append(f"f{i + 1} = {format_poly(p, sys.names)}")
    if sys.order != tuple(range(sys.n)):
        lines.append("order = " + ",".join(str(v + 1) for v in sys.order))
    if degree is not None:
        lines.append(f"degree = {degree}")
    if seed is not None:
        lines.append(f"seed = {seed}")
    return "\n".join(lines) + "\n"


def system_namer(sys, short_f: bool = False) -> Namer:
    return Namer(tuple(sys.names), sys.s, short_f)
