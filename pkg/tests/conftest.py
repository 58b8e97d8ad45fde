import itertools
import random
from pathlib import Path

import pytest
import sympy

from koszul_bezout.bezout import PolySystem
from koszul_bezout.grassmann import Context, odd
from koszul_bezout.homology import dual_context
from koszul_bezout.poly import VarFamily
from koszul_bezout.textio import parse_multivector, parse_system

SYSTEMS_DIR = Path(__file__).resolve().parents[1] / "src" / "koszul_bezout" / "systems"


def ctx_of(n, s, evens=("x",), odds=("fx",)):
    return Context([VarFamily(e, n) for e in evens], [odd(o, s) for o in odds])


def mv(text, ctx):
    return parse_multivector(text, ctx)


def system(text):
    return parse_system(text.replace(";", "\n"))


def functional(sys: PolySystem, text):
    return parse_multivector(text, dual_context(sys.koszul().ctx))


@pytest.fixture
def rng():
    return random.Random(20240611)


def standard_monomial_count(sys: PolySystem):
    """Oracle: number of standard monomials of a Groebner basis (sympy)."""
    xs = sympy.symbols(f"v0:{sys.n}")
    polys = []
    for p in sys.f:
        polys.append(sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([v ** e for v, e in zip(xs, ex)])
                         for ex, c in p.terms.items()))
    G = sympy.groebner(polys, *xs, order="grevlex")
    leads = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(sum(m) for m in leads) + 1
    count = 0
    for e in itertools.product(range(bound * sys.n + 1), repeat=sys.n):
        if not any(all(a >= b for a, b in zip(e, m)) for m in leads):
            count += 1
    return count
