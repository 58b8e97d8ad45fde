"""Exact sparse Gaussian elimination over the rationals.

Matrices are given column-wise as ``{row key: Fraction}`` dictionaries;
row keys are arbitrary hashables.  Elimination is deterministic: columns
are processed in the given order and the pivot is the entry of smallest
``(|numerator|, denominator)``, ties broken by first appearance of the row.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

Column = Mapping[Hashable, Fraction]


@dataclass
class Echelon:
    """Reduced row echelon form of ``[A | b]``.

    ``pivots`` maps a pivot column to its reduced row ``{column: value}``
    (without the pivot entry itself, which is 1) and ``rhs`` to the
    corresponding right-hand side entries.
    """

    ncols: int
    pivots: dict[int, dict[int, Fraction]]
    rhs: dict[int, dict[int, Fraction]]
    inconsistent: list[int]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list[int]:
        return [j for j in range(self.ncols) if j not in self.pivots]


def _pivot_key(v: Fraction, order: int):
    return (abs(v.numerator), v.denominator, order)


def echelon(columns: Sequence[Column], rhs: Sequence[Column] = ()) -> Echelon:
    """Row-reduce ``[columns | rhs]`` fully.

    Any number of right-hand sides can be carried along; ``inconsistent``
    lists the right-hand sides (by position) that admit no solution.
    """
    row_ids: dict[Hashable, int] = {}
    rows: list[dict[int, Fraction]] = []
    brows: list[dict[int, Fraction]] = []

    def row_of(key):
        r = row_ids.get(key)
        if r is None:
            r = row_ids[key] = len(rows)
            rows.append({})
            brows.append({})
        return r

    # column index -> rows having a nonzero entry there
    col_rows: list[set[int]] = []
    for j, col in enumerate(columns):
        rs = set()
        for key, v in col.items():
            if v:
                r = row_of(key)
                rows[r][j] = Fraction(v)
                rs.add(r)
        col_rows.append(rs)
    for k, col in enumerate(rhs):
        for key, v in col.items():
            if v:
                brows[row_of(key)][k] = Fraction(v)

    used: set[int] = set()
    pivot_row: dict[int, int] = {}
    for j in range(len(columns)):
        cands = [r for r in col_rows[j] if r not in used]
        if not cands:
            continue
        p = min(cands, key=lambda r: _pivot_key(rows[r][j], r))
        used.add(p)
        prow, pb = rows[p], brows[p]
        inv = 1 / prow[j]
        if inv != 1:
            for c in prow:
                prow[c] *= inv
            for c in pb:
                pb[c] *= inv
        pivot_row[j] = p
        for r in list(col_rows[j]):
            if r == p:
                continue
            row = rows[r]
            factor = row[j]
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    if c not in row:
                        col_rows[c].add(r)
                    row[c] = nv
                else:
                    row.pop(c, None)
                    col_rows[c].discard(r)
            brow = brows[r]
            for c, v in pb.items():
                nv = brow.get(c, 0) - factor * v
                if nv:
                    brow[c] = nv
                else:
                    brow.pop(c, None)
    inconsistent = set()
    for r in range(len(rows)):
        if r not in used and not rows[r] and brows[r]:
            inconsistent.update(brows[r])
    pivots = {j: {c: v for c, v in rows[p].items() if c != j} for j, p in pivot_row.items()}
    prhs = {j: dict(brows[p]) for j, p in pivot_row.items()}
    return Echelon(len(columns), pivots, prhs, sorted(inconsistent))


def solve(columns: Sequence[Column], b: Column) -> dict[int, Fraction] | None:
    """Solution of ``A x = b`` with free variables set to zero, or None."""
    ech = echelon(columns, [b])
    if ech.inconsistent:
        return None
    return {j: r[0] for j, r in ech.rhs.items() if r.get(0)}


def solve_many(columns: Sequence[Column], bs: Sequence[Column]) -> list[dict[int, Fraction] | None]:
    ech = echelon(columns, bs)
    bad = set(ech.inconsistent)
    out = []
    for k in range(len(bs)):
        if k in bad:
            out.append(None)
        else:
            out.append({j: r[k] for j, r in ech.rhs.items() if r.get(k)})
    return out


def rank(columns: Sequence[Column]) -> int:
    return echelon(columns).rank


def nullspace(columns: Sequence[Column]) -> list[dict[int, Fraction]]:
    """Basis of the kernel, one vector per free column."""
    ech = echelon(columns)
    basis = []
    for f in ech.free_columns():
        vec = {f: Fraction(1)}
        for j, row in ech.pivots.items():
            v = row.get(f)
            if v:
                vec[j] = -v
        basis.append(vec)
    return basis


def apply(columns: Sequence[Column], x: Mapping[int, Fraction]) -> dict:
    """``A x`` as a row-keyed dictionary."""
    out: dict = {}
    for j, v in x.items():
        if not v:
            continue
        for key, a in columns[j].items():
            nv = out.get(key, 0) + a * v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
    return out
