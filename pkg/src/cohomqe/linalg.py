"""Exact reduced row echelon forms over the rationals.

A basis is a tuple of rows (tuples of :class:`~fractions.Fraction`) in reduced
row echelon form, sorted by pivot column.  That form is unique for a row
space, so bases can be hashed and compared directly.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Row = tuple[Fraction, ...]
Basis = tuple[Row, ...]


def pivot(row: Sequence[Fraction]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return -1


def reduce_row(basis: Basis, row: Sequence) -> list[Fraction]:
    """Reduce ``row`` against ``basis``; the result is zero iff ``row`` is in the row space."""
    r = [Fraction(x) for x in row]
    for b in basis:
        p = pivot(b)
        c = r[p]
        if c:
            r = [x - c * y for x, y in zip(r, b)]
    return r


def insert_row(basis: Basis, row: Sequence) -> Basis:
    r = reduce_row(basis, row)
    p = pivot(r)
    if p < 0:
        return basis
    lead = r[p]
    r = tuple(x / lead for x in r)
    out = []
    for b in basis:
        c = b[p]
        out.append(tuple(x - c * y for x, y in zip(b, r)) if c else b)
    out.append(r)
    out.sort(key=pivot)
    return tuple(out)


def rref(rows: Iterable[Sequence]) -> Basis:
    basis: Basis = ()
    for row in rows:
        basis = insert_row(basis, row)
    return basis


def span_sum(a: Basis, b: Basis) -> Basis:
    """Basis of the sum of two row spaces (the intersection of their zero sets)."""
    if len(a) < len(b):
        a, b = b, a
    for row in b:
        a = insert_row(a, row)
    return a


def contains(big: Basis, small: Basis) -> bool:
    """True if the row space of ``small`` lies inside that of ``big``."""
    if len(small) > len(big):
        return False
    return all(not any(reduce_row(big, row)) for row in small)
