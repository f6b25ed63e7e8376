"""
Proper formulas: negation-free and/or trees over multi-homogeneous atoms.

Text format (s-expressions)::

    (blocks (w 1) (x 1) (x 1))
    (prefix exists forall)
    (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))
        (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))

``w`` blocks are free, ``x`` blocks are bound; each kind is indexed from zero
in declaration order.  Internally the free blocks come first, so block ``i``
of a formula with ``m`` free blocks is ``w{i}`` for ``i < m`` and ``x{i-m}``
otherwise.  Coefficients are integers; rational inputs are scaled by the
least common multiple of their denominators, atom by atom.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterator, Sequence, Union

from .errors import (
    ArityMismatch,
    BlockMismatch,
    FormulaSyntaxError,
    NegationPresent,
    NotMultiHomogeneous,
    ValidationError,
)
from .polyring import BlockSignature, as_signature

EXISTS = "exists"
FORALL = "forall"


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class MultiHomPoly:
    """Integer polynomial in the homogeneous coordinates of every block.

    ``terms`` is a tuple of ``(exponents, coeff)`` pairs, exponents spanning all
    ``blocks.ncoords`` coordinates, sorted in descending lexicographic order of
    exponent vectors with zero coefficients removed.
    """

    blocks: BlockSignature
    terms: tuple[tuple[tuple[int, ...], int], ...]

    def __init__(self, blocks, terms):
        blocks = as_signature(blocks)
        merged: dict[tuple[int, ...], int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != blocks.ncoords:
                raise ArityMismatch(
                    f"exponent vector of length {len(exps)} for {blocks.ncoords} coordinates")
            merged[exps] = merged.get(exps, 0) + int(c)
        ordered = tuple(sorted(((e, c) for e, c in merged.items() if c != 0), reverse=True))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "terms", ordered)

    def is_zero(self) -> bool:
        return not self.terms

    def block_degrees(self, exps: Sequence[int]) -> tuple[int, ...]:
        out = []
        for off, n in zip(self.blocks.offsets(), self.blocks.dims):
            out.append(sum(exps[off:off + n + 1]))
        return tuple(out)

    @cached_property
    def multidegree(self) -> tuple[int, ...] | None:
        """Common per-block degree of all terms, or ``None`` if the atom is not multi-homogeneous.

        The zero polynomial is treated as homogeneous of multidegree zero.
        """
        if not self.terms:
            return (0,) * len(self.blocks)
        degs = {self.block_degrees(e) for e, _ in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def inhomogeneous_block(self) -> int | None:
        if not self.terms:
            return None
        first = self.block_degrees(self.terms[0][0])
        for e, _ in self.terms[1:]:
            d = self.block_degrees(e)
            for i, (a, b) in enumerate(zip(first, d)):
                if a != b:
                    return i
        return None

    def coefficients(self) -> list[int]:
        return [c for _, c in self.terms]

    def evaluate(self, point: Sequence[int], modulus: int | None = None) -> int:
        total = 0
        for exps, c in self.terms:
            v = c
            for x, e in zip(point, exps):
                if e:
                    v *= x ** e if modulus is None else pow(x, e, modulus)
            total += v
        return total if modulus is None else total % modulus


# ---------------------------------------------------------------------------
# formula trees


class Node:
    """Base of the formula tree node types."""

    @cached_property
    def key(self) -> str:
        return self._key()

    def _key(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Atom(Node):
    poly: MultiHomPoly

    def _key(self):
        return "(=0 " + ";".join(f"{c}:{','.join(map(str, e))}" for e, c in self.poly.terms) + ")"


def _sorted_children(children) -> tuple:
    children = tuple(children)
    if not children:
        raise ValidationError("and/or nodes need at least one child; use TRUE/FALSE for constants")
    return tuple(sorted(children, key=lambda c: c.key))


@dataclass(frozen=True, eq=True)
class And(Node):
    """Conjunction.  Children are stored in canonical (sorted) order; duplicates are kept."""

    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", _sorted_children(children))

    def _key(self):
        return "(and " + " ".join(c.key for c in self.children) + ")"


@dataclass(frozen=True, eq=True)
class Or(Node):
    children: tuple

    def __init__(self, children):
        object.__setattr__(self, "children", _sorted_children(children))

    def _key(self):
        return "(or " + " ".join(c.key for c in self.children) + ")"


@dataclass(frozen=True, eq=True)
class Not(Node):
    """Only produced by the parser so that validation can report it."""

    child: Node

    def _key(self):
        return f"(not {self.child.key})"


@dataclass(frozen=True, eq=True)
class _Const(Node):
    value: bool

    def _key(self):
        return "(true)" if self.value else "(false)"

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = _Const(True)   # empty conjunction
FALSE = _Const(False)  # empty disjunction

Tree = Union[Atom, And, Or, Not, _Const]


@dataclass(frozen=True)
class ProperFormula:
    blocks: BlockSignature
    free_count: int
    tree: Node
    prefix: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "blocks", as_signature(self.blocks))
        if self.prefix is not None:
            object.__setattr__(self, "prefix", tuple(self.prefix))

    @property
    def bound_count(self) -> int:
        return len(self.blocks) - self.free_count

    @property
    def free_dims(self) -> tuple[int, ...]:
        return self.blocks.dims[: self.free_count]

    @property
    def bound_dims(self) -> tuple[int, ...]:
        return self.blocks.dims[self.free_count:]

    def quantifier_free(self) -> ProperFormula:
        return ProperFormula(self.blocks, self.free_count, self.tree, None)

    def atoms(self) -> list[Atom]:
        return [a for _, a in iter_atoms(self.tree)]

    def __str__(self):
        return format_formula(self)


def iter_atoms(tree: Node, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Atom]]:
    if isinstance(tree, Atom):
        yield path, tree
    elif isinstance(tree, (And, Or)):
        for i, c in enumerate(tree.children):
            yield from iter_atoms(c, path + (i,))
    elif isinstance(tree, Not):
        yield from iter_atoms(tree.child, path + (0,))


def node_count(tree: Node) -> int:
    """Number of s-expression nodes (lists and leaf tokens) in the serialized body."""
    if isinstance(tree, _Const):
        return 2
    if isinstance(tree, Atom):
        return 2 + _poly_node_count(tree.poly)
    if isinstance(tree, Not):
        return 2 + node_count(tree.child)
    return 2 + sum(node_count(c) for c in tree.children)


def _poly_node_count(p: MultiHomPoly) -> int:
    def term_nodes(exps, c):
        nvars = sum(exps)
        if nvars == 0:
            return 1
        if c == 1 and nvars == 1:
            return 1
        return 2 + nvars + (0 if c == 1 else 1)

    if not p.terms:
        return 1
    if len(p.terms) == 1:
        return term_nodes(*p.terms[0])
    return 2 + sum(term_nodes(e, c) for e, c in p.terms)


# ---------------------------------------------------------------------------
# validation


def validate_proper(f: ProperFormula) -> bool:
    """Raise a :class:`ValidationError` subclass unless ``f`` is a proper formula."""
    if not 0 <= f.free_count <= len(f.blocks):
        raise ValidationError("free block count out of range", free_count=f.free_count)
    if f.prefix is not None:
        if len(f.prefix) != f.bound_count:
            raise ValidationError(
                f"prefix has {len(f.prefix)} quantifiers for {f.bound_count} bound blocks")
        bad = [q for q in f.prefix if q not in (EXISTS, FORALL)]
        if bad:
            raise ValidationError(f"unknown quantifier {bad[0]!r}")
    _validate_node(f.tree, f.blocks, (), top=True)
    return True


def _validate_node(node, blocks, path, top=False):
    if isinstance(node, _Const):
        if not top:
            raise ValidationError("true/false only allowed as the whole body", path=list(path))
    elif isinstance(node, Not):
        raise NegationPresent("negation is not allowed in a proper formula", path=list(path))
    elif isinstance(node, Atom):
        if node.poly.blocks != blocks:
            raise BlockMismatch(
                f"atom over blocks {node.poly.blocks} in a formula over {blocks}", path=list(path))
        if node.poly.multidegree is None:
            raise NotMultiHomogeneous("atom is not multi-homogeneous", path=list(path),
                                      block=node.poly.inhomogeneous_block())
    elif isinstance(node, (And, Or)):
        for i, c in enumerate(node.children):
            _validate_node(c, blocks, path + (i,))
    else:
        raise ValidationError(f"unknown node type {type(node).__name__}", path=list(path))


# ---------------------------------------------------------------------------
# renaming


def block_rename_map(source: BlockSignature, target: BlockSignature,
                     mapping: Sequence[tuple[int, int]]) -> list[int]:
    """Coordinate map for sending block ``i`` of ``source`` to ``(block, offset)`` slot of ``target``."""
    source, target = as_signature(source), as_signature(target)
    if len(mapping) != len(source):
        raise ArityMismatch(f"mapping has {len(mapping)} entries for {len(source)} blocks")
    toff = target.offsets()
    coord_map = []
    for i, (n, (tb, off)) in enumerate(zip(source.dims, mapping)):
        if not 0 <= tb < len(target):
            raise ArityMismatch(f"block {i} sent to missing target block {tb}")
        if off < 0 or off + n + 1 > target.dims[tb] + 1:
            raise ArityMismatch(
                f"block {i} (P^{n}) does not fit at offset {off} of target block P^{target.dims[tb]}",
                block=i)
        coord_map.extend(toff[tb] + off + c for c in range(n + 1))
    return coord_map


def rename_tree(tree: Node, target: BlockSignature, coord_map: Sequence[int]) -> Node:
    width = target.ncoords

    def go(node):
        if isinstance(node, Atom):
            terms = []
            for exps, c in node.poly.terms:
                new = [0] * width
                for k, e in enumerate(exps):
                    if e:
                        new[coord_map[k]] += e
                terms.append((tuple(new), c))
            return Atom(MultiHomPoly(target, terms))
        if isinstance(node, And):
            return And(go(c) for c in node.children)
        if isinstance(node, Or):
            return Or(go(c) for c in node.children)
        if isinstance(node, Not):
            return Not(go(node.child))
        return node

    return go(tree)


def substitute_blocks(f: ProperFormula, target: BlockSignature | Sequence[int],
                      mapping: Sequence[tuple[int, int]], free_count: int | None = None,
                      prefix: Sequence[str] | None = None) -> ProperFormula:
    """Rename the blocks of ``f`` into slots of a bigger signature.

    ``mapping[i] = (j, offset)`` puts the coordinates of block ``i`` at
    positions ``offset .. offset + n_i`` of target block ``j``.
    """
    target = as_signature(target)
    coord_map = block_rename_map(f.blocks, target, mapping)
    if free_count is None:
        free_count = f.free_count if len(target) == len(f.blocks) else 0
    return ProperFormula(target, free_count, rename_tree(f.tree, target, coord_map),
                         tuple(prefix) if prefix is not None else None)


# ---------------------------------------------------------------------------
# formatting


def _var_name(block: int, coord: int, free_count: int) -> str:
    if block < free_count:
        return f"w{block}_{coord}"
    return f"x{block - free_count}_{coord}"


def _format_poly(p: MultiHomPoly, free_count: int) -> str:
    if not p.terms:
        return "0"
    names = []
    for b, n in enumerate(p.blocks.dims):
        names.extend(_var_name(b, c, free_count) for c in range(n + 1))

    def term(exps, c):
        factors = []
        for name, e in zip(names, exps):
            factors.extend([name] * e)
        if not factors:
            return str(c)
        if c == 1 and len(factors) == 1:
            return factors[0]
        if c != 1:
            factors.insert(0, str(c))
        return "(* " + " ".join(factors) + ")"

    parts = [term(e, c) for e, c in p.terms]
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _format_node(node, free_count: int, indent: int) -> str:
    pad = " " * indent
    if isinstance(node, _Const):
        return pad + node.key
    if isinstance(node, Atom):
        return pad + "(=0 " + _format_poly(node.poly, free_count) + ")"
    if isinstance(node, Not):
        return pad + "(not\n" + _format_node(node.child, free_count, indent + 2) + ")"
    head = "and" if isinstance(node, And) else "or"
    if all(isinstance(c, Atom) for c in node.children) and len(node.children) <= 3:
        inner = " ".join(_format_node(c, free_count, 0) for c in node.children)
        return f"{pad}({head} {inner})"
    inner = "\n".join(_format_node(c, free_count, indent + 2) for c in node.children)
    return f"{pad}({head}\n{inner})"


def format_formula(f: ProperFormula) -> str:
    decls = []
    for b, n in enumerate(f.blocks.dims):
        decls.append(f"({'w' if b < f.free_count else 'x'} {n})")
    lines = ["(blocks " + " ".join(decls) + ")"]
    if f.prefix is not None and f.prefix:
        lines.append("(prefix " + " ".join(f.prefix) + ")")
    lines.append(_format_node(f.tree, f.free_count, 0))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing


@dataclass
class _Tok:
    text: str
    line: int
    col: int


@dataclass
class _List:
    items: list = field(default_factory=list)
    line: int = 0
    col: int = 0


_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_VAR_RE = re.compile(r"^([wx])(\d+)_(\d+)$")
_NUM_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _read(text: str) -> list:
    stack = [_List()]
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(0)
        if tok == "(":
            stack.append(_List([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise FormulaSyntaxError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok.isspace() and not tok.startswith(";"):
            stack[-1].items.append(_Tok(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
    if len(stack) != 1:
        opened = stack[-1]
        raise FormulaSyntaxError("unclosed '('", opened.line, opened.col)
    return stack[0].items


def _pos(x):
    return x.line, x.col


def _head(x) -> str | None:
    if isinstance(x, _List) and x.items and isinstance(x.items[0], _Tok):
        return x.items[0].text
    return None


class _Parser:
    def __init__(self, blocks: BlockSignature, free_count: int, var_index: dict):
        self.blocks = blocks
        self.free_count = free_count
        self.var_index = var_index
        self.width = blocks.ncoords

    def clause(self, x, top=False):
        if not isinstance(x, _List):
            raise FormulaSyntaxError(f"expected a clause, got {x.text!r}", *_pos(x))
        h = _head(x)
        args = x.items[1:]
        if h in ("and", "or"):
            if not args:
                if top:
                    return TRUE if h == "and" else FALSE
                raise FormulaSyntaxError(f"({h}) needs at least one clause", *_pos(x))
            kids = [self.clause(a) for a in args]
            return And(kids) if h == "and" else Or(kids)
        if h in ("true", "false") and not args:
            if not top:
                raise ValidationError(f"({h}) is only allowed as the whole body", line=x.line)
            return TRUE if h == "true" else FALSE
        if h == "not":
            if len(args) != 1:
                raise FormulaSyntaxError("(not ...) takes one clause", *_pos(x))
            return Not(self.clause(args[0]))
        if h == "=0":
            if len(args) != 1:
                raise FormulaSyntaxError("(=0 ...) takes one polynomial", *_pos(x))
            return Atom(self.atom_poly(args[0]))
        raise FormulaSyntaxError(f"unknown clause head {h!r}", *_pos(x))

    def atom_poly(self, x) -> MultiHomPoly:
        terms = self.poly(x)
        den = lcm(*(c.denominator for c in terms.values())) if terms else 1
        return MultiHomPoly(self.blocks, {e: int(c * den) for e, c in terms.items()})

    def poly(self, x) -> dict:
        if isinstance(x, _Tok):
            return self.factor(x)
        h = _head(x)
        args = x.items[1:]
        if h == "+" and args:
            out: dict = {}
            for a in args:
                for e, c in self.poly(a).items():
                    out[e] = out.get(e, 0) + c
            return {e: c for e, c in out.items() if c != 0}
        if h == "*" and args:
            out = {(0,) * self.width: Fraction(1)}
            for a in args:
                out = _pmul(out, self.poly(a))
            return out
        raise FormulaSyntaxError("expected a polynomial: number, variable, (+ ...) or (* ...)",
                                 *_pos(x))

    def factor(self, tok: _Tok) -> dict:
        t = tok.text
        if _NUM_RE.match(t):
            c = Fraction(t)
            return {(0,) * self.width: c} if c else {}
        m = _VAR_RE.match(t)
        if not m:
            raise FormulaSyntaxError(f"bad token {t!r}", tok.line, tok.col)
        key = (m.group(1), int(m.group(2)))
        if key not in self.var_index:
            raise FormulaSyntaxError(f"variable {t} refers to an undeclared block", tok.line, tok.col)
        block = self.var_index[key]
        coord = int(m.group(3))
        if coord > self.blocks.dims[block]:
            raise FormulaSyntaxError(
                f"variable {t}: coordinate {coord} exceeds block dimension {self.blocks.dims[block]}",
                tok.line, tok.col)
        exps = [0] * self.width
        exps[self.blocks.offsets()[block] + coord] = 1
        return {tuple(exps): Fraction(1)}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def parse_formula(text: str) -> ProperFormula:
    """Parse and validate a formula in the s-expression format."""
    forms = _read(text)
    if not forms:
        raise FormulaSyntaxError("empty input", 1, 1)
    first = forms[0]
    if _head(first) != "blocks":
        raise FormulaSyntaxError("input must start with (blocks ...)", *_pos(first))
    free, bound = [], []
    for decl in first.items[1:]:
        if (not isinstance(decl, _List) or len(decl.items) != 2
                or not all(isinstance(t, _Tok) for t in decl.items)
                or decl.items[0].text not in ("w", "x") or not decl.items[1].text.isdigit()):
            raise FormulaSyntaxError("block declaration must look like (w <dim>) or (x <dim>)",
                                     *_pos(decl))
        (free if decl.items[0].text == "w" else bound).append(int(decl.items[1].text))
    if not free and not bound:
        raise FormulaSyntaxError("(blocks) declares no block", *_pos(first))
    blocks = BlockSignature(free + bound)
    var_index = {("w", i): i for i in range(len(free))}
    var_index.update({("x", j): len(free) + j for j in range(len(bound))})

    rest = forms[1:]
    prefix = None
    if rest and _head(rest[0]) == "prefix":
        qs = rest[0].items[1:]
        for q in qs:
            if not isinstance(q, _Tok) or q.text not in (EXISTS, FORALL):
                raise FormulaSyntaxError("prefix entries must be 'exists' or 'forall'", *_pos(q))
        prefix = tuple(q.text for q in qs)
        rest = rest[1:]
    if len(rest) != 1:
        where = rest[1] if len(rest) > 1 else first
        raise FormulaSyntaxError(f"expected exactly one body clause, found {len(rest)}", *_pos(where))

    tree = _Parser(blocks, len(free), var_index).clause(rest[0], top=True)
    f = ProperFormula(blocks, len(free), tree, prefix)
    validate_proper(f)
    return f


def load_formula(path) -> ProperFormula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read())
