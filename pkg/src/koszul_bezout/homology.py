"""Truncated-degree linear algebra on Koszul complexes and their duals.

Truncation uses a weighted degree: a monomial ``x^b`` times a word ``W``
has weight ``|b| + sum_(g in W) deg(value(g))``.  With these weights the
boundary never raises the weight, so ``V_D`` (weight <= D) is a
subcomplex.  The truncated dual complex is the space of functionals on
``V_D``: it uses the full dual boundary followed by dropping every term of
weight above ``D``.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .bezout import (FX, FY, DegenerateSystemWarning, PolySystem, X, Y, as_x_functional,
                     difference_jacobian, j_map, left_action)
from .grassmann import Context, Multivector, OddFamily, dual_name, is_dual_name, primal_name
from .koszul import boundary, normalize_assignment
from .poly import VarFamily


class NotACycleError(ValueError):
    """The element handed to the boundary solver is not a cycle."""


@dataclass(frozen=True)
class TruncationConfig:
    """Maximum weighted degree ``D`` and an optional f-degree window."""

    D: int
    fdeg_min: int | None = None
    fdeg_max: int | None = None

    def __post_init__(self):
        if self.D < 0:
            raise ValueError("D must be >= 0")


@dataclass
class BoundaryCertificate:
    """``boundary(preimage) == target`` at truncation ``D``, or a refusal.

    For functionals the equality holds after dropping terms above ``D``
    (``projected`` is then True).
    """

    target: Multivector
    preimage: Multivector | None
    D: int
    projected: bool = False
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.preimage is not None

    def __bool__(self):
        return self.found


# weights and bases ----------------------------------------------------------

def generator_weights(ctx: Context, asg, weighted: bool = True) -> list[int]:
    """Weight of every odd generator id of ``ctx`` (dual ones share it)."""
    asg = normalize_assignment(asg) if asg else {}
    out = []
    for g in range(ctx.nodd):
        name, idx = ctx.gen_name(g)
        base = primal_name(name)
        w = 0
        if weighted and base in asg:
            w = max(asg[base][idx].poly_degree(), 0)
        out.append(w)
    return out


def weight_of(key, weights) -> int:
    exps, word = key
    return sum(exps) + sum(weights[g] for g in word)


def max_weight(m: Multivector, weights) -> int:
    return max((weight_of(k, weights) for k in m.terms), default=-1)


def _monomials(nv: int, budget: int):
    """Exponent vectors in ``nv`` variables with total degree <= budget."""
    out = []
    for d in range(budget + 1):
        for combo in itertools.combinations_with_replacement(range(nv), d):
            e = [0] * nv
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    # degree ascending, then lex descending within a degree
    out.sort(key=lambda e: (sum(e), tuple(-v for v in e)))
    return out


def basis_keys(ctx: Context, fdeg: int, D: int, weights: Sequence[int] | None = None) -> list:
    """Term keys ``(exps, word)`` of f-degree ``fdeg`` and weight <= D."""
    weights = weights or [0] * ctx.nodd
    words = []
    for k in range(ctx.nodd + 1):
        for w in itertools.combinations(range(ctx.nodd), k):
            if ctx.word_degree(w) == fdeg:
                words.append(w)
    mono_cache: dict[int, list] = {}
    keys = []
    for w in words:
        budget = D - sum(weights[g] for g in w)
        if budget < 0:
            continue
        if budget not in mono_cache:
            mono_cache[budget] = _monomials(ctx.nevars, budget)
        keys += [(e, w) for e in mono_cache[budget]]
    return keys


def basis_enumerate(ctx: Context, fdeg: int, D: int, weights: Sequence[int] | None = None) -> list[Multivector]:
    """All monomials of f-degree ``fdeg`` with (weighted) degree <= D."""
    return [Multivector(ctx, {k: Fraction(1)}, _trusted=True) for k in basis_keys(ctx, fdeg, D, weights)]


def dual_context(ctx: Context) -> Context:
    return Context([VarFamily(dual_name(f.name), f.arity, f.name) for f in ctx.evens],
                   [OddFamily(dual_name(f.name), f.arity, f.name) for f in ctx.odds])


# truncated complexes ------------------------------------------------------

class TruncatedComplex:
    """Weighted truncation of a Koszul-type complex or of its dual.

    ``ctx`` is the primal context; with ``dual=True`` elements live in the
    dual context and the boundary is projected back into weight <= D.
    """

    def __init__(self, ctx: Context, asg, D: int, dual: bool = False, weighted: bool = True):
        self.primal_ctx = ctx
        self.asg = normalize_assignment(asg)
        self.D = D
        self.dual = dual
        self.ctx = dual_context(ctx) if dual else ctx
        self.weights = generator_weights(self.ctx, self.asg, weighted)
        self._basis: dict[int, list] = {}
        self._cols: dict[int, list] = {}

    @property
    def fdegs(self) -> range:
        s = self.ctx.nodd
        return range(-s, 1) if self.dual else range(0, s + 1)

    def basis(self, fdeg: int) -> list:
        if fdeg not in self._basis:
            self._basis[fdeg] = basis_keys(self.ctx, fdeg, self.D, self.weights)
        return self._basis[fdeg]

    def element(self, key, coef=1) -> Multivector:
        return Multivector(self.ctx, {key: Fraction(coef)}, _trusted=True)

    def combine(self, keys, coeffs) -> Multivector:
        terms = {}
        for j, v in coeffs.items():
            if v:
                terms[keys[j]] = terms.get(keys[j], 0) + v
        return Multivector(self.ctx, {k: v for k, v in terms.items() if v}, _trusted=True)

    def project(self, m: Multivector) -> Multivector:
        m = _into(m, self.ctx)
        return Multivector(self.ctx, {k: c for k, c in m.terms.items()
                                      if weight_of(k, self.weights) <= self.D}, _trusted=True)

    def contains(self, m: Multivector) -> bool:
        m = _into(m, self.ctx)
        return all(weight_of(k, self.weights) <= self.D for k in m.terms)

    def d(self, m: Multivector) -> Multivector:
        """Boundary inside the truncation."""
        out = _into(boundary(_into(m, self.ctx), self.asg), self.ctx)
        return self.project(out) if self.dual else out

    def columns(self, fdeg: int) -> list[dict]:
        """Boundary images of the basis in degree ``fdeg`` as term dictionaries."""
        if fdeg not in self._cols:
            self._cols[fdeg] = [dict(self.d(self.element(k)).terms) for k in self.basis(fdeg)]
        return self._cols[fdeg]

    def cycles(self, fdeg: int) -> list[Multivector]:
        keys = self.basis(fdeg)
        return [self.combine(keys, v) for v in linalg.nullspace(self.columns(fdeg))]

    def homology_rank(self, fdeg: int) -> int:
        cols = self.columns(fdeg)
        ker = len(cols) - linalg.rank(cols)
        im = linalg.rank(self.columns(fdeg + 1)) if self._has(fdeg + 1) else 0
        return ker - im

    def _has(self, fdeg: int) -> bool:
        return fdeg in self.fdegs

    def size(self) -> int:
        return sum(len(self.basis(k)) for k in self.fdegs)

    def preimage(self, z: Multivector) -> Multivector | None:
        """Some ``xi`` with ``d(xi) == z`` inside the truncation, or None."""
        z = _into(z, self.ctx)
        if not z:
            return Multivector.zero(self.ctx)
        fdeg = z.degree() + 1
        if not self._has(fdeg):
            return None
        sol = linalg.solve(self.columns(fdeg), z.terms)
        if sol is None:
            return None
        return self.combine(self.basis(fdeg), sol)


def _into(m: Multivector, ctx: Context) -> Multivector:
    """Re-express ``m`` in ``ctx``, dropping families that carry nothing."""
    if m.ctx == ctx:
        return m
    return m.trimmed().to(ctx)


# boundary matrices and membership -------------------------------------------

@dataclass
class BoundaryMatrix:
    """Sparse matrix of the boundary between two monomial bases."""

    domain: list
    codomain: list
    columns: list[dict]

    def dense(self) -> list[list[Fraction]]:
        index = {k: i for i, k in enumerate(self.codomain)}
        rows = [[Fraction(0)] * len(self.domain) for _ in self.codomain]
        for j, col in enumerate(self.columns):
            for k, v in col.items():
                rows[index[k]][j] = v
        return rows

    def __matmul__(self, other: "BoundaryMatrix") -> "BoundaryMatrix":
        pos = {k: i for i, k in enumerate(self.domain)}
        cols = []
        for col in other.columns:
            acc: dict = {}
            for k, v in col.items():
                if k not in pos:
                    raise ValueError("codomain of the right factor escapes the domain of the left")
                for k2, w in self.columns[pos[k]].items():
                    nv = acc.get(k2, 0) + v * w
                    if nv:
                        acc[k2] = nv
                    else:
                        acc.pop(k2, None)
            cols.append(acc)
        return BoundaryMatrix(other.domain, self.codomain, cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)


def boundary_matrix(ctx: Context, asg, fdeg: int, D: int, weighted: bool = False) -> BoundaryMatrix:
    """Matrix of the boundary from f-degree ``fdeg`` to ``fdeg - 1``.

    Unweighted (default): the domain is all monomials of degree <= D and
    the codomain is padded by the largest value degree so that every
    image fits.  Weighted: both sides are the weight-<= D truncation.
    """
    asg = normalize_assignment(asg)
    if weighted:
        w = generator_weights(ctx, asg)
        dom, cod = basis_keys(ctx, fdeg, D, w), basis_keys(ctx, fdeg - 1, D, w)
    else:
        pad = max([v.poly_degree() for vals in asg.values() for v in vals] + [0])
        dom, cod = basis_keys(ctx, fdeg, D), basis_keys(ctx, fdeg - 1, D + pad)
    codset = set(cod)
    cols = []
    for k in dom:
        img = _into(boundary(Multivector(ctx, {k: Fraction(1)}, _trusted=True), asg), ctx)
        extra = [t for t in img.terms if t not in codset]
        if extra:
            # widen the codomain rather than losing terms
            for t in extra:
                cod.append(t)
                codset.add(t)
        cols.append(dict(img.terms))
    return BoundaryMatrix(dom, cod, cols)


def _is_dual_ctx(ctx: Context) -> bool:
    fams = ctx.evens + ctx.odds
    return bool(fams) and all(is_dual_name(f.name) for f in fams)


def _primal_of(ctx: Context) -> Context:
    return Context([VarFamily(primal_name(f.name), f.arity) for f in ctx.evens],
                   [OddFamily(primal_name(f.name), f.arity) for f in ctx.odds])


def _with_assigned(ctx: Context, asg) -> Context:
    """Add the assigned odd families (and their value variables) to ``ctx``."""
    for name, vals in normalize_assignment(asg).items():
        if not ctx.has(name):
            ctx = ctx.union(Context((), (OddFamily(name, len(vals)),)))
        for v in vals:
            ctx = ctx.union(Context(v.ctx.evens))
    return ctx


def solve_boundary_membership(z: Multivector, asg, D: int, ctx: Context | None = None,
                              extra: int = 0) -> BoundaryCertificate:
    """Find ``xi`` with ``d(xi) = z`` in the weighted truncation.

    ``ctx`` is the primal context of the complex (defaults to the families
    of ``z``).  Functionals (dual families) are solved in the truncated
    dual complex.  The truncation degree is raised to the weight of ``z``
    if needed, then up to ``extra`` more steps are tried.  Raises
    :class:`NotACycleError` if ``z`` is not a cycle at that truncation.
    """
    if ctx is None:
        ctx = z.trimmed().ctx
    dual = _is_dual_ctx(ctx) or any(is_dual_name(n) for n in z.trimmed().ctx.names())
    pctx = _primal_of(ctx) if dual else ctx
    pctx = _with_assigned(pctx, asg)
    probe = TruncatedComplex(pctx, asg, D, dual=dual)
    zz = _into(z, probe.ctx)
    D_eff = max(D, max_weight(zz, probe.weights))
    last = None
    for step in range(extra + 1):
        cx = TruncatedComplex(pctx, asg, D_eff + step, dual=dual)
        if step == 0 and cx.d(zz):
            raise NotACycleError("target is not a cycle")
        xi = cx.preimage(zz)
        if xi is not None:
            check = cx.d(xi)
            if check != zz:
                raise AssertionError("solver returned a wrong preimage")
            return BoundaryCertificate(zz, xi, D_eff + step, projected=dual)
        last = D_eff + step
    return BoundaryCertificate(zz, None, last, projected=dual,
                               reason=f"not found at degree {last}; raise D")


# quotient and homology dimensions ----------------------------------------

def quotient_dimension(sys: PolySystem, D: int | None = None) -> tuple[int, bool]:
    """``dim`` of monomials of degree <= D modulo span{m f_i : deg <= D}.

    Returns ``(dimension at D, same value at D + 1)``.
    """
    D = sys.default_degree() if D is None else D

    def dim(d):
        monos = _monomials(sys.n, d)
        cols = []
        for p in sys.f:
            if not p:
                continue
            pd = p.degree()
            for m in _monomials(sys.n, d - pd) if d >= pd else []:
                cols.append({tuple(a + b for a, b in zip(e, m)): c for e, c in p.terms.items()})
        return len(monos) - linalg.rank(cols)

    a = dim(D)
    return a, a == dim(D + 1)


def homology_rank(sys: PolySystem, fdeg: int, D: int | None = None, dual: bool | None = None) -> tuple[int, bool]:
    """Rank of the truncated homology in f-degree ``fdeg``.

    Negative ``fdeg`` (or ``dual=True``) selects the dual complex.
    Returns ``(rank at D, same value at D + 1)``.
    """
    D = sys.default_degree() if D is None else D
    dual = fdeg < 0 if dual is None else dual
    cx = sys.koszul()

    def rank_at(d):
        return TruncatedComplex(cx.ctx, cx.asg, d, dual=dual).homology_rank(fdeg)

    a = rank_at(D)
    return a, a == rank_at(D + 1)


# unit preimage ------------------------------------------------------------

@dataclass
class UnitPreimage:
    """``e`` (a truncated dual cycle) and ``t`` with ``jmap(e) = 1 + d t``."""

    e: Multivector | None
    t: Multivector | None
    D: int
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.e is not None

    def __bool__(self):
        return self.found


def _quiet_jacobian(sys: PolySystem, order=None) -> Multivector:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSystemWarning)
        return difference_jacobian(sys, order).J


def _part_weight(J: Multivector, even: str, odd: str, weights_by_index) -> int:
    ctx = J.ctx
    best = -1
    for (exps, word) in J.terms:
        w = 0
        if ctx.has(even):
            off = ctx.even_offset[even]
            w += sum(exps[off:off + ctx.family(even).arity])
        for g in word:
            name, idx = ctx.gen_name(g)
            if name == odd:
                w += weights_by_index[idx]
        best = max(best, w)
    return best


def jacobian_weights(sys: PolySystem, J: Multivector | None = None) -> tuple[int, int]:
    """Largest weights of the ``x`` side and the ``y`` side of J."""
    J = _quiet_jacobian(sys) if J is None else J
    degs = sys.degrees
    return _part_weight(J, X, FX, degs), _part_weight(J, Y, FY, degs)


def find_unit_preimage(sys: PolySystem, D: int | None = None) -> UnitPreimage:
    """Solve ``d e = 0`` (truncated) and ``jmap(e) - d t = 1`` jointly.

    ``e`` ranges over functionals of f-degree ``-(s - n)`` and weight <= D;
    ``t`` over elements of f-degree 1.  Free unknowns are set to zero.
    """
    D = sys.default_degree() if D is None else D
    J = _quiet_jacobian(sys)
    cx = sys.koszul()
    dual = TruncatedComplex(cx.ctx, cx.asg, D, dual=True)
    efdeg = -(sys.s - sys.n)
    if efdeg not in dual.fdegs:
        return UnitPreimage(None, None, D, reason="no functionals of the required degree")
    ekeys = dual.basis(efdeg)
    images = [j_map(sys, dual.element(k), J) for k in ekeys]
    primal_probe = TruncatedComplex(cx.ctx, cx.asg, D)
    Dt = max([D] + [max_weight(_into(m, cx.ctx), primal_probe.weights) for m in images])
    primal = TruncatedComplex(cx.ctx, cx.asg, Dt)
    tkeys = primal.basis(1) if 1 in primal.fdegs else []
    cols = []
    dcols = dual.columns(efdeg)
    for img, dcol in zip(images, dcols):
        col = {("d",) + (k,): v for k, v in dcol.items()}
        for k, v in _into(img, cx.ctx).terms.items():
            col[("p", k)] = v
        cols.append(col)
    tcols = primal.columns(1) if tkeys else []
    for tcol in tcols:
        cols.append({("p", k): -v for k, v in tcol.items()})
    one = ("p", ((0,) * cx.ctx.nevars, ()))
    sol = linalg.solve(cols, {one: Fraction(1)})
    if sol is None:
        return UnitPreimage(None, None, D, reason=f"no unit preimage at degree {D}; raise D")
    ne = len(ekeys)
    e = dual.combine(ekeys, {j: v for j, v in sol.items() if j < ne})
    t = primal.combine(tkeys, {j - ne: v for j, v in sol.items() if j >= ne})
    # independent re-check
    if dual.d(e) or _into(j_map(sys, e, J), cx.ctx) - primal.d(t) != Multivector.scalar(1, cx.ctx):
        raise AssertionError("unit preimage failed its re-check")
    return UnitPreimage(e, t, D)


def extend_dual_cycle(sys: PolySystem, e: Multivector, D_from: int, D_to: int) -> Multivector | None:
    """A truncated dual cycle at ``D_to`` agreeing with ``e`` up to weight ``D_from``."""
    cx = sys.koszul()
    big = TruncatedComplex(cx.ctx, cx.asg, D_to, dual=True)
    e = _into(e, big.ctx)
    fdeg = e.degree()
    keys = big.basis(fdeg)
    low = [j for j, k in enumerate(keys) if weight_of(k, big.weights) <= D_from]
    cols = [{("d", k): v for k, v in col.items()} for col in big.columns(fdeg)]
    for j in low:
        cols[j][("fix", keys[j])] = Fraction(1)
    rhs = {("fix", k): v for k, v in e.terms.items()}
    for k in e.terms:
        if weight_of(k, big.weights) > D_from:
            raise ValueError("e has terms above D_from")
    sol = linalg.solve(cols, rhs)
    if sol is None:
        return None
    return big.combine(keys, sol)


# homotopy inverse ---------------------------------------------------------

@dataclass
class ItemResult:
    sample: Multivector
    certificate: object
    passed: bool


@dataclass
class InverseReport:
    """Per-item results of the homotopy-inverse verification."""

    D: int
    items: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.items.get(i) and all(r.passed for r in self.items[i]) for i in (1, 2, 3, 4))

    def counts(self) -> dict:
        return {i: (sum(r.passed for r in rs), len(rs)) for i, rs in self.items.items()}


def _all_basis(cx: TruncatedComplex):
    out = []
    for k in cx.fdegs:
        out += [(k, key) for key in cx.basis(k)]
    return out


def _solve_homotopy(source: TruncatedComplex, target: TruncatedComplex, g):
    """Find ``H`` of degree +1 with ``d H(b) + H(d b) = g(b)`` on the basis of ``source``.

    ``g`` maps a basis element to an element of ``target``.  Returns a dict
    basis key -> H(b), or None.
    """
    basis = _all_basis(source)
    var_index = []  # (basis key, target key)
    cols = []
    dcache = {}
    for fdeg, key in basis:
        tdeg = fdeg + 1
        if tdeg not in target.fdegs:
            continue
        for tk in target.basis(tdeg):
            var_index.append((key, tk))
            if (tdeg, tk) not in dcache:
                dcache[(tdeg, tk)] = target.d(target.element(tk)).terms
            cols.append({(key, k): v for k, v in dcache[(tdeg, tk)].items()})
    pos = {}
    for j, (key, tk) in enumerate(var_index):
        pos.setdefault(key, []).append(j)
    # H(d b): for every b' with coefficient a in d b, add a * H(b') into b's equations
    for fdeg, key in basis:
        db = source.d(source.element(key))
        for k2, a in db.terms.items():
            for j in pos.get(k2, []):
                tk = var_index[j][1]
                col = cols[j]
                col[(key, tk)] = col.get((key, tk), 0) + a
    rhs = {}
    for fdeg, key in basis:
        for k, v in _into(g(source.element(key)), target.ctx).terms.items():
            rhs[(key, k)] = v
    for col in cols:
        for k in [k for k, v in col.items() if not v]:
            del col[k]
    sol = linalg.solve(cols, rhs)
    if sol is None:
        return None
    H = {}
    for j, v in sol.items():
        key, tk = var_index[j]
        H.setdefault(key, {})
        H[key][tk] = v
    return {key: Multivector(target.ctx, H.get(key, {}), _trusted=True) for _, key in basis}


def _grow(make, start: int, need: int, cap: int):
    """Smallest D in [start, cap] with ``make(D)`` yielding at least ``need`` items."""
    D = start
    while True:
        items = make(D)
        if len(items) >= need or D >= cap:
            return D, items
        D += 1


def homotopy_inverse_check(sys: PolySystem, e: Multivector, t: Multivector | None = None,
                           samples: int = 10, D: int | None = None, max_raise: int | None = None) -> InverseReport:
    """Verify that ``c -> bot(e * c)`` is a homotopy inverse of the J-map.

    Items 3 and 4 certify ``c - jmap(bot(e c))`` (primal cycles) and
    ``c - bot(e jmap(c))`` (dual cycles) as boundaries.  Items 1 and 2
    solve for homotopies ``R`` and ``L`` on a whole truncated basis.  The
    samples are exhaustive bases of truncations, so this is a finite
    check, not a proof.
    """
    D = sys.default_degree() if D is None else D
    J = _quiet_jacobian(sys)
    cx = sys.koszul()
    jx, jy = jacobian_weights(sys, J)
    jx, jy = max(jx, 0), max(jy, 0)
    report = InverseReport(D)
    e = as_x_functional(e)
    cap = D + (samples + 2 if max_raise is None else max_raise)
    if t is not None and _into(j_map(sys, e, J), cx.ctx) - boundary(t, cx.asg) != Multivector.scalar(1, cx.ctx):
        raise ValueError("(e, t) does not satisfy jmap(e) = 1 + d t")

    extended: dict[int, Multivector] = {}

    def e_up_to(d):
        if d not in extended:
            ext = extend_dual_cycle(sys, e, D, d)
            if ext is None:
                raise RuntimeError(f"cannot extend e to degree {d}")
            extended[d] = ext
        return extended[d]

    # item 3: primal cycles
    def primal_cycles(d):
        tc = TruncatedComplex(cx.ctx, cx.asg, d)
        out = []
        for k in tc.fdegs:
            out += tc.cycles(k)
        return out

    D3, cyc = _grow(primal_cycles, D, samples, cap)
    e3 = e_up_to(D3 + jy)
    res = []
    for c in cyc[:samples]:
        z = c - _into(j_map(sys, left_action(e3, c), J), cx.ctx)
        cert = solve_boundary_membership(z, cx.asg, D3, ctx=cx.ctx, extra=2)
        res.append(ItemResult(c, cert, cert.found))
    report.items[3] = res
    report.notes[3] = {"D": D3}

    # item 4: dual cycles
    def dual_cycles(d):
        tc = TruncatedComplex(cx.ctx, cx.asg, d, dual=True)
        out = []
        for k in tc.fdegs:
            out += tc.cycles(k)
        return out

    D4, dcyc = _grow(dual_cycles, max(D, jy), samples, cap)
    e4 = e_up_to(D4 + jx)
    tc4 = TruncatedComplex(cx.ctx, cx.asg, D4, dual=True)
    res = []
    for c in dcyc[:samples]:
        z = tc4.project(c - left_action(e4, j_map(sys, c, J)))
        try:
            xi = tc4.preimage(z)
        except Exception:  # pragma: no cover - defensive
            xi = None
        ok = xi is not None and tc4.d(xi) == z
        res.append(ItemResult(c, BoundaryCertificate(z, xi, D4, projected=True), ok))
    report.items[4] = res
    report.notes[4] = {"D": D4}

    # item 1: homotopy R on a full primal truncation
    Ds, _ = _grow(lambda d: _all_basis(TruncatedComplex(cx.ctx, cx.asg, d)), D, samples, cap)
    src = TruncatedComplex(cx.ctx, cx.asg, Ds)
    e1 = e_up_to(Ds + jy)

    def g1(b):
        return b - _into(j_map(sys, left_action(e1, b), J), cx.ctx)

    need = max([max_weight(_into(g1(src.element(k)), cx.ctx), src.weights) for _, k in _all_basis(src)] + [Ds])
    R = None
    for DR in range(need, need + 3):
        R = _solve_homotopy(src, TruncatedComplex(cx.ctx, cx.asg, DR), g1)
        if R is not None:
            break
    res = []
    for _, key in _all_basis(src):
        b = src.element(key)
        if R is None:
            res.append(ItemResult(b, None, False))
            continue
        db = src.d(b)
        lhs = boundary(R[key], cx.asg) + sum((R[k].scale(v) for k, v in db.terms.items()),
                                             Multivector.zero(cx.ctx))
        res.append(ItemResult(b, R[key], _into(lhs, cx.ctx) == _into(g1(b), cx.ctx)))
    report.items[1] = res
    report.notes[1] = {"D": Ds, "D_target": DR if R is not None else None}

    # item 2: homotopy L on a full truncated dual complex
    Dd, _ = _grow(lambda d: _all_basis(TruncatedComplex(cx.ctx, cx.asg, d, dual=True)),
                  max(D, jy), samples, cap)
    dsrc = TruncatedComplex(cx.ctx, cx.asg, Dd, dual=True)
    e2 = e_up_to(Dd + jx)

    def g2(c):
        return dsrc.project(c - left_action(e2, j_map(sys, c, J)))

    L = _solve_homotopy(dsrc, dsrc, g2)
    res = []
    for _, key in _all_basis(dsrc):
        c = dsrc.element(key)
        if L is None:
            res.append(ItemResult(c, None, False))
            continue
        dc = dsrc.d(c)
        lhs = dsrc.d(L[key]) + sum((L[k].scale(v) for k, v in dc.terms.items()),
                                   Multivector.zero(dsrc.ctx))
        res.append(ItemResult(c, L[key], lhs == g2(c)))
    report.items[2] = res
    report.notes[2] = {"D": Dd}
    return report


# duality helpers used by the acceptance checks ----------------------------

def dual_cycle_samples(sys: PolySystem, D: int, count: int, margin: int = 0) -> list[Multivector]:
    """Truncated dual cycles computed at ``D + margin`` (all f-degrees)."""
    cx = sys.koszul()
    tc = TruncatedComplex(cx.ctx, cx.asg, D + margin, dual=True)
    out = []
    for k in tc.fdegs:
        out += tc.cycles(k)
    return out[:count]


def certify_dual_boundary(sys: PolySystem, z: Multivector, D: int) -> BoundaryCertificate:
    """Certify a functional as a boundary of the dual truncation at ``D``."""
    cx = sys.koszul()
    tc = TruncatedComplex(cx.ctx, cx.asg, D, dual=True)
    zz = tc.project(z)
    if tc.d(zz):
        raise NotACycleError("functional is not a truncated cycle")
    xi = tc.preimage(zz)
    if xi is None:
        return BoundaryCertificate(zz, None, D, projected=True, reason=f"not found at degree {D}")
    assert tc.d(xi) == zz
    return BoundaryCertificate(zz, xi, D, projected=True)


def _pair_margin(sys: PolySystem) -> int:
    jx, jy = jacobian_weights(sys)
    return max(jx, 0) + max(jy, 0)


def jproduct_order_check(sys: PolySystem, c1: Multivector, c2: Multivector, order2,
                         D: int | None = None) -> BoundaryCertificate:
    """Certify ``jp_J(c1, c2) - jp_J'(c1, c2)`` as a truncated dual boundary.

    ``J'`` is built with variable order ``order2``.  ``c1`` and ``c2`` must
    be truncated dual cycles at ``D`` plus the Jacobian weights.
    """
    from .bezout import j_product
    D = sys.default_degree() if D is None else D
    J1, J2 = _quiet_jacobian(sys), _quiet_jacobian(sys, order2)
    z = j_product(sys, c1, c2, J1) - j_product(sys, c1, c2, J2)
    return certify_dual_boundary(sys, as_x_functional(z), D)


def jproduct_skew_check(sys: PolySystem, c1: Multivector, c2: Multivector,
                        D: int | None = None) -> BoundaryCertificate:
    """Certify ``jp(c1, c2) - (-1)^(|c1|'|c2|') jp(c2, c1)`` as a truncated dual boundary.

    Here ``|c|' = |c| + |J|``.
    """
    from .bezout import j_product
    D = sys.default_degree() if D is None else D
    J = _quiet_jacobian(sys)
    dj = sys.s - sys.n
    c1, c2 = as_x_functional(c1), as_x_functional(c2)
    p1, p2 = c1.degree() + dj, c2.degree() + dj
    sgn = -1 if (p1 * p2) & 1 else 1
    z = j_product(sys, c1, c2, J) - j_product(sys, c2, c1, J).scale(sgn)
    return certify_dual_boundary(sys, z, D)


def jproduct_samples(sys: PolySystem, D: int | None = None, count: int = 6) -> list[Multivector]:
    """Truncated dual cycles wide enough for the J-product checks at ``D``."""
    D = sys.default_degree() if D is None else D
    return dual_cycle_samples(sys, D, count, margin=_pair_margin(sys))
