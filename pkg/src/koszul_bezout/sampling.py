"""Seeded random polynomials, systems and multivectors for the check suites."""
from __future__ import annotations

import random
from fractions import Fraction

from .bezout import PolySystem
from .grassmann import Context, Multivector
from .poly import Polynomial, VarFamily


def _rng(rng) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def random_coef(rng: random.Random, lo: int = -3, hi: int = 3, rational: bool = False) -> Fraction:
    c = Fraction(rng.randint(lo, hi))
    if rational and rng.random() < 0.3:
        c /= rng.randint(2, 3)
    return c


def random_exponents(rng: random.Random, n: int, deg: int) -> tuple:
    e = [0] * n
    for _ in range(rng.randint(0, deg)):
        e[rng.randrange(n)] += 1
    return tuple(e)


def random_polynomial(rng, n: int, deg: int, nterms: int = 3, rational: bool = False,
                      family: str = "x") -> Polynomial:
    """Sum of up to ``nterms`` monomials of degree <= deg (may cancel to 0)."""
    rng = _rng(rng)
    terms: dict = {}
    for _ in range(nterms):
        e = random_exponents(rng, n, deg)
        terms[e] = terms.get(e, 0) + random_coef(rng, rational=rational)
    return Polynomial((VarFamily(family, n),), terms)


def random_system(rng, n: int, s: int, deg: int, nterms: int = 3) -> PolySystem:
    rng = _rng(rng)
    polys = [random_polynomial(rng, n, deg, nterms) for _ in range(s)]
    return PolySystem(polys, n=n)


def random_multivector(rng, ctx: Context, deg: int, nterms: int = 3, odd_density: float = 0.4,
                       fdeg: int | None = None) -> Multivector:
    """Random element of ``ctx``: monomials of degree <= deg times random words.

    With ``fdeg`` set, only terms of that f-degree are kept.
    """
    rng = _rng(rng)
    terms: dict = {}
    for _ in range(nterms):
        exps = random_exponents(rng, ctx.nevars, deg) if ctx.nevars else ()
        word = tuple(g for g in range(ctx.nodd) if rng.random() < odd_density)
        if fdeg is not None and ctx.word_degree(word) != fdeg:
            continue
        key = (exps, word)
        terms[key] = terms.get(key, 0) + random_coef(rng)
    return Multivector(ctx, {k: v for k, v in terms.items() if v})
