"""
Exact classes of unions of products of linear subspaces.

A quantifier-free formula whose atoms are linear forms in a single block
realizes a finite union of :class:`LinearPiece` objects, each a product of
projective linear subspaces.  Such unions are polynomial-count, so their
class in the Grothendieck ring is an integer polynomial in the Lefschetz
class ``L``.  Its coefficients are the even Betti numbers only when the
union has no odd cohomology; a cycle of four lines already has ``b_1 = 1``.
:mod:`cohomqe.cohomology` computes Betti numbers in general.

Two independent routes compute that polynomial:

* DNF expansion into pieces followed by inclusion-exclusion
  (:func:`formula_to_pieces`, :func:`pieces_class`);
* brute-force point counting over prime fields and interpolation
  (:func:`count_points`, :func:`class_from_counts`).
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


from . import linalg
from .errors import (
    BudgetExceeded,
    MixedBlockAtom,
    NegativeCoefficient,
    NonLinearAtom,
    NotPolynomialCount,
    PieceLimitExceeded,
    PrimeRequired,
)
from .formula import FALSE, TRUE, And, Atom, Not, Or, ProperFormula, _Const
from .polyring import BlockSignature, IntPoly, as_signature, projective_q, substitute_t_power

DEFAULT_PIECE_CAP = 4096
DEFAULT_BUDGET = 10 ** 7
SUBSET_PIECE_CAP = 20


@dataclass(frozen=True)
class LinearPiece:
    """Product over blocks of the zero sets of linear systems (stored in RREF)."""

    blocks: BlockSignature
    systems: tuple[linalg.Basis, ...]

    @classmethod
    def full(cls, blocks) -> LinearPiece:
        blocks = as_signature(blocks)
        return cls(blocks, tuple(() for _ in blocks.dims))

    @classmethod
    def from_equations(cls, blocks, equations: dict[int, Sequence[Sequence]]) -> LinearPiece:
        blocks = as_signature(blocks)
        systems = [linalg.rref(equations.get(i, ())) for i in range(len(blocks))]
        return cls(blocks, tuple(systems))

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        """Dimension of the linear subspace in each block (-1 when empty)."""
        return tuple(n - r for n, r in zip(self.blocks.dims, self.ranks))

    def is_empty(self) -> bool:
        return any(r > n for n, r in zip(self.blocks.dims, self.ranks))

    def contains(self, other: LinearPiece) -> bool:
        """``other`` is a subset of ``self``."""
        return all(linalg.contains(o, s) for s, o in zip(self.systems, other.systems))

    def restrict(self, keep: Sequence[int]) -> LinearPiece:
        return LinearPiece(BlockSignature(self.blocks.dims[i] for i in keep),
                           tuple(self.systems[i] for i in keep))

    def class_in_L(self) -> IntPoly:
        if self.is_empty():
            return IntPoly()
        out = IntPoly([1])
        for k in self.dims:
            out = out * projective_q(k)
        return out


def intersect_pieces(a: LinearPiece, b: LinearPiece) -> LinearPiece | None:
    """Blockwise intersection; ``None`` when it is empty."""
    systems = []
    for n, sa, sb in zip(a.blocks.dims, a.systems, b.systems):
        s = linalg.span_sum(sa, sb) if sb and sa is not sb else sa if sa else sb
        if len(s) > n:
            return None
        systems.append(s)
    return LinearPiece(a.blocks, tuple(systems))


def reduce_pieces(pieces: Iterable[LinearPiece]) -> list[LinearPiece]:
    """Drop empties and duplicates, then every piece contained in another one."""
    uniq = list(dict.fromkeys(p for p in pieces if p is not None and not p.is_empty()))
    if len(uniq) < 2:
        return uniq
    ranks = [p.ranks for p in uniq]
    keep = []
    for i, p in enumerate(uniq):
        subsumed = False
        for j, q in enumerate(uniq):
            if i == j or not all(ri >= rj for ri, rj in zip(ranks[i], ranks[j])):
                continue
            if q.contains(p):
                subsumed = True
                break
        if not subsumed:
            keep.append(p)
    return keep


# ---------------------------------------------------------------------------
# formula -> pieces


def atom_piece(atom: Atom, path=()) -> LinearPiece | None:
    """Piece cut out by one atom; ``None`` if the atom is a nonzero constant."""
    poly = atom.poly
    blocks = poly.blocks
    if poly.is_zero():
        return LinearPiece.full(blocks)
    md = poly.multidegree
    if md is None or any(d > 1 for d in md):
        raise NonLinearAtom("atom is not linear", path=list(path))
    nz = [i for i, d in enumerate(md) if d]
    if not nz:
        return None
    if len(nz) > 1:
        raise MixedBlockAtom("linear atom mixes several blocks", path=list(path))
    b = nz[0]
    off = blocks.offsets()[b]
    row = [0] * (blocks.dims[b] + 1)
    for exps, c in poly.terms:
        k = next(k for k, e in enumerate(exps) if e)
        row[k - off] = c
    return LinearPiece.from_equations(blocks, {b: [row]})


def formula_to_pieces(f: ProperFormula, cap: int = DEFAULT_PIECE_CAP) -> list[LinearPiece]:
    """Union of linear pieces realizing a quantifier-free formula (prefix ignored)."""
    blocks = f.blocks

    def check(parts):
        if len(parts) > cap:
            raise PieceLimitExceeded(f"{len(parts)} partial pieces exceed the cap of {cap}",
                                     limit=cap)
        return parts

    def go(node, path):
        if isinstance(node, _Const):
            return [LinearPiece.full(blocks)] if node.value else []
        if isinstance(node, Atom):
            p = atom_piece(node, path)
            return [] if p is None else [p]
        if isinstance(node, Or):
            out = []
            for i, c in enumerate(node.children):
                out.extend(go(c, path + (i,)))
                check(out)
            return check(reduce_pieces(out))
        if isinstance(node, And):
            kids = sorted((go(c, path + (i,)) for i, c in enumerate(node.children)), key=len)
            partial = [LinearPiece.full(blocks)]
            for kid in kids:
                if not kid:
                    return []
                partial = check(reduce_pieces(
                    intersect_pieces(p, q) for p in partial for q in kid))
                if not partial:
                    return []
            return partial
        if isinstance(node, Not):
            raise NonLinearAtom("negations are outside the oracle's scope", path=list(path))
        raise TypeError(type(node).__name__)

    return go(f.tree, ())


# ---------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class GrothClass:
    poly_in_L: IntPoly

    def __str__(self):
        return str(self.poly_in_L).replace("T", "L")

    def evaluate(self, q: int) -> int:
        return self.poly_in_L(q)


def union_class(pieces: Sequence[LinearPiece]) -> IntPoly:
    """Class of a union by the scissor recursion ``[U ∪ P] = [U] + [P] - [U ∩ P]``.

    This is inclusion-exclusion with each inner union reduced to its maximal
    pieces before recursing, which keeps it polynomial on the arrangements
    produced by joins.
    """
    memo: dict = {}

    def go(ps: list[LinearPiece]) -> IntPoly:
        ps = reduce_pieces(ps)
        if not ps:
            return IntPoly()
        if len(ps) == 1:
            return ps[0].class_in_L()
        key = frozenset(ps)
        if key in memo:
            return memo[key]
        total = IntPoly()
        for k, p in enumerate(ps):
            total = total + p.class_in_L()
            if k:
                total = total - go([intersect_pieces(p, q) for q in ps[:k]])
        memo[key] = total
        return total

    return go(list(pieces))


def subsets_class(pieces: Sequence[LinearPiece], cap: int = SUBSET_PIECE_CAP) -> IntPoly:
    """Literal inclusion-exclusion over nonempty subsets, pruning supersets of empty intersections."""
    pieces = list(pieces)
    if len(pieces) > cap:
        raise PieceLimitExceeded(f"{len(pieces)} pieces exceed the subset-enumeration cap {cap}",
                                 limit=cap)
    total = IntPoly()

    def go(start: int, inter: LinearPiece, size: int):
        nonlocal total
        for j in range(start, len(pieces)):
            nxt = pieces[j] if inter is None else intersect_pieces(inter, pieces[j])
            if nxt is None:
                continue
            sign = 1 if (size + 1) % 2 else -1
            total = total + sign * nxt.class_in_L()
            go(j + 1, nxt, size + 1)

    go(0, None, 0)
    return total


def pieces_class(pieces: Sequence[LinearPiece], method: str = "scissor") -> GrothClass:
    if method == "subsets":
        return GrothClass(subsets_class(pieces))
    return GrothClass(union_class(pieces))


def formula_class(f: ProperFormula, cap: int = DEFAULT_PIECE_CAP) -> GrothClass:
    return pieces_class(formula_to_pieces(f, cap))


def class_to_Q(c: GrothClass) -> IntPoly:
    """The class read as a pseudo-Poincare polynomial.

    Valid when the union has cohomology in even degrees only; a negative
    coefficient proves that it does not.
    """
    if any(x < 0 for x in c.poly_in_L):
        raise NegativeCoefficient(f"class {c} has a negative coefficient")
    return c.poly_in_L


def class_to_P(c: GrothClass) -> IntPoly:
    return substitute_t_power(class_to_Q(c), 2)


def project_pieces(pieces: Sequence[LinearPiece], keep: Iterable[int]) -> list[LinearPiece]:
    keep = sorted(set(keep))
    return reduce_pieces(p.restrict(keep) for p in pieces)


# ---------------------------------------------------------------------------
# point counting


def projective_points(n: int, q: int):
    """One normalized representative (first nonzero coordinate 1) per point of P^n(F_q)."""
    for lead in range(n + 1):
        for tail in itertools.product(range(q), repeat=n - lead):
            yield (0,) * lead + (1,) + tail


def _compile(node, q):
    if isinstance(node, _Const):
        return lambda pt: node.value
    if isinstance(node, Atom):
        terms = []
        for exps, c in node.poly.terms:
            terms.append((c % q, [(k, e) for k, e in enumerate(exps) if e]))

        def atom(pt):
            s = 0
            for c, vs in terms:
                v = c
                for k, e in vs:
                    v = v * pt[k] ** e if e > 1 else v * pt[k]
                s += v
            return s % q == 0
        return atom
    if isinstance(node, (And, Or)):
        kids = [_compile(c, q) for c in node.children]
        if isinstance(node, And):
            return lambda pt: all(k(pt) for k in kids)
        return lambda pt: any(k(pt) for k in kids)
    raise NonLinearAtom("negations are outside the oracle's scope")


def _check_prime(f: ProperFormula, q: int):
    from sympy import isprime   # deferred: sympy is slow to import
    if not isprime(q):
        raise PrimeRequired(f"{q} is not prime", q=q)
    for a in f.atoms():
        for c in a.poly.coefficients():
            if c % q == 0:
                raise PrimeRequired(f"prime {q} divides atom coefficient {c}", q=q)


def point_budget(blocks: BlockSignature, q: int) -> int:
    total = 1
    for n in blocks.dims:
        total *= (q ** (n + 1) - 1) // (q - 1)
    return total


def count_points(f: ProperFormula, q: int, budget: int = DEFAULT_BUDGET,
                 threads: int | None = None) -> int:
    """Number of F_q-points of the realization, by enumeration."""
    _check_prime(f, q)
    size = point_budget(f.blocks, q)
    if size > budget:
        raise BudgetExceeded(f"{size} points exceed the enumeration budget {budget}",
                             points=size, budget=budget)
    test = _compile(f.tree, q)
    per_block = [list(projective_points(n, q)) for n in f.blocks.dims]

    def count(first_chunk):
        total = 0
        for combo in itertools.product(first_chunk, *per_block[1:]):
            pt = tuple(itertools.chain.from_iterable(combo))
            if test(pt):
                total += 1
        return total

    threads = threads or int(os.environ.get("COHOMQE_THREADS", "1") or 1)
    head = per_block[0]
    if threads <= 1 or len(head) < 2:
        return count(head)
    chunks = [head[i::threads] for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(count, chunks))


def interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    """Coefficients (ascending) of the Lagrange interpolant through the points."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = 1
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        for k in range(n):
            coeffs[k] += Fraction(ys[i], denom) * basis[k]
    return coeffs


def class_from_counts(f: ProperFormula, primes: Sequence[int], budget: int = DEFAULT_BUDGET,
                      threads: int | None = None) -> GrothClass:
    primes = list(primes)
    dim = f.blocks.total
    if len(set(primes)) != len(primes):
        raise NotPolynomialCount("primes must be distinct")
    if len(primes) < dim + 1:
        raise NotPolynomialCount(f"need at least {dim + 1} primes, got {len(primes)}")
    counts = [count_points(f, q, budget, threads) for q in primes]
    coeffs = interpolate(primes, counts)
    if any(c.denominator != 1 for c in coeffs):
        raise NotPolynomialCount("point counts are not interpolated by an integer polynomial",
                                 counts=counts)
    poly = IntPoly(int(c) for c in coeffs)
    if poly.degree > dim:
        raise NotPolynomialCount(f"interpolant has degree {poly.degree} > {dim}", counts=counts)
    return GrothClass(poly)
