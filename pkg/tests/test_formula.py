"""Parsing, validation, renaming and printing of proper formulas."""
from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from cohomqe.errors import (
    ArityMismatch,
    BlockMismatch,
    FormulaSyntaxError,
    NegationPresent,
    NotMultiHomogeneous,
    ValidationError,
)
from cohomqe.formula import (
    EXISTS,
    FORALL,
    TRUE,
    And,
    Atom,
    MultiHomPoly,
    Not,
    Or,
    ProperFormula,
    format_formula,
    iter_atoms,
    parse_formula,
    substitute_blocks,
    validate_proper,
)
from cohomqe.polyring import BlockSignature


def test_parse_example(eg_psi):
    assert eg_psi.free_count == 1 and eg_psi.bound_count == 2
    assert eg_psi.blocks.dims == (1, 1, 1)
    assert eg_psi.prefix == (EXISTS, FORALL)
    mds = {a.poly.multidegree for a in eg_psi.atoms()}
    assert mds == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert validate_proper(eg_psi)


def test_parse_single_atom():
    f = parse_formula("(blocks (x 1)) (=0 x0_0)")
    assert f.free_count == 0 and f.prefix is None
    (atom,) = f.atoms()
    assert atom.poly.terms == (((1, 0), 1),)


def test_negation_rejected():
    with pytest.raises(NegationPresent):
        parse_formula("(blocks (x 1)) (not (=0 x0_0))")


def test_not_homogeneous():
    with pytest.raises(NotMultiHomogeneous):
        parse_formula("(blocks (x 1)) (=0 (+ (* x0_0 x0_0) (* -1 x0_1)))")
    f = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* -1 x0_1)))")
    assert f.atoms()[0].poly.multidegree == (1,)


def test_rationals_cleared():
    f = parse_formula("(blocks (x 1)) (=0 (+ (* 1/2 x0_0) (* 1/3 x0_1)))")
    assert sorted(f.atoms()[0].poly.coefficients()) == [2, 3]


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("(blocks (x 1))\n(=0 y0_0)")
    assert err.value.line == 2


@pytest.mark.parametrize("text", [
    "",
    "(blocks) (=0 x0_0)",
    "(blocks (x 1)) (=0 x1_0)",
    "(blocks (x 1)) (=0 x0_2)",
    "(blocks (x 1)) (and (=0 x0_0)",
    "(blocks (x 1)) (foo x0_0)",
    "(blocks (x 1)) (=0 x0_0) (=0 x0_1)",
])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_prefix_length_checked():
    with pytest.raises(ValidationError):
        parse_formula("(blocks (x 1) (x 1)) (prefix exists) (=0 x0_0)")


def test_empty_child_list_only_at_top():
    assert parse_formula("(blocks (x 1)) (and)").tree is TRUE
    with pytest.raises(FormulaSyntaxError):
        parse_formula("(blocks (x 1)) (or (and) (=0 x0_0))")
    with pytest.raises(ValidationError):
        And([])


def test_block_mismatch():
    other = MultiHomPoly((2,), {(1, 0, 0): 1})
    f = ProperFormula(BlockSignature((1,)), 0, And([Atom(other)]))
    with pytest.raises(BlockMismatch):
        validate_proper(f)


def test_validate_reports_negation_path():
    a = Atom(MultiHomPoly((1,), {(1, 0): 1}))
    f = ProperFormula((1,), 0, Or([a, Not(a)]))
    with pytest.raises(NegationPresent) as err:
        validate_proper(f)
    assert err.value.details["path"] == [1]


def test_substitute_into_slot(eg_psi):
    # block X^(1) into slot t = 2 of P^7: coordinates 4 and 5
    sub = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* -1 x0_1)))")
    out = substitute_blocks(sub, (7,), [(0, 2 * (1 + 1))])
    (atom,) = out.atoms()
    used = sorted({k for e, _ in atom.poly.terms for k, x in enumerate(e) if x})
    assert used == [4, 5]


def test_substitute_identity(eg_psi):
    same = substitute_blocks(eg_psi, eg_psi.blocks, [(0, 0), (1, 0), (2, 0)],
                             free_count=1, prefix=eg_psi.prefix)
    assert same == eg_psi


def test_substitute_wrong_width(eg_psi):
    with pytest.raises(ArityMismatch):
        substitute_blocks(eg_psi, (1, 1), [(0, 0), (1, 0)])
    with pytest.raises(ArityMismatch):
        substitute_blocks(eg_psi, (1, 1, 1), [(0, 0), (1, 1), (2, 0)])


def test_format_example_round_trip(eg_psi):
    text = format_formula(eg_psi)
    assert parse_formula(text) == eg_psi
    assert format_formula(parse_formula(text)) == text


def test_children_canonical_order():
    a = "(=0 x0_0)"
    b = "(=0 x0_1)"
    f1 = parse_formula(f"(blocks (x 1)) (or {a} {b})")
    f2 = parse_formula(f"(blocks (x 1)) (or {b} {a})")
    assert f1 == f2


# random formulas for the round-trip and shape properties

def _atoms(dims):
    blocks = BlockSignature(dims)
    width = blocks.ncoords
    offs = blocks.offsets()

    @st.composite
    def atom(draw):
        b = draw(st.integers(0, len(dims) - 1))
        deg = draw(st.integers(1, 2))
        nterms = draw(st.integers(1, 3))
        terms = {}
        for _ in range(nterms):
            e = [0] * width
            for _ in range(deg):
                e[offs[b] + draw(st.integers(0, dims[b]))] += 1
            terms[tuple(e)] = draw(st.integers(-5, 5).filter(bool))
        poly = MultiHomPoly(blocks, terms)
        if poly.is_zero():
            poly = MultiHomPoly(blocks, {tuple(e): 1})
        return Atom(poly)
    return atom()


def _trees(dims):
    return st.recursive(
        _atoms(dims),
        lambda kids: st.one_of(st.lists(kids, min_size=1, max_size=3).map(And),
                               st.lists(kids, min_size=1, max_size=3).map(Or)),
        max_leaves=8)


_dims = st.lists(st.integers(0, 2), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_format_parse_round_trip(data):
    dims = data.draw(_dims)
    free = data.draw(st.integers(0, len(dims)))
    tree = data.draw(_trees(dims))
    f = ProperFormula(BlockSignature(dims), free, tree)
    validate_proper(f)
    assert parse_formula(format_formula(f)) == f


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_substitute_preserves_shape(data):
    dims = data.draw(_dims)
    tree = data.draw(_trees(dims))
    f = ProperFormula(BlockSignature(dims), 0, tree)
    big = tuple(2 * n + 1 for n in dims)
    g = substitute_blocks(f, big, [(i, n + 1) for i, n in enumerate(dims)])
    validate_proper(g)
    src = [(p, len(a.poly.terms)) for p, a in iter_atoms(f.tree)]
    dst = [(p, len(a.poly.terms)) for p, a in iter_atoms(g.tree)]
    assert sorted(n for _, n in src) == sorted(n for _, n in dst)
    assert len(src) == len(dst)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_homogeneity_check(data):
    """Adding a lower-degree term in one block breaks homogeneity, and only then."""
    dims = data.draw(_dims)
    atom = data.draw(_atoms(dims))
    blocks = BlockSignature(dims)
    f = ProperFormula(blocks, 0, atom)
    assert validate_proper(f)
    e, _ = atom.poly.terms[0]
    b = next(i for i, d in enumerate(atom.poly.multidegree) if d)
    lower = list(e)
    k = next(k for k in range(blocks.offsets()[b], blocks.offsets()[b] + dims[b] + 1) if lower[k])
    lower[k] -= 1
    broken = MultiHomPoly(blocks, dict(atom.poly.terms) | {tuple(lower): 1})
    with pytest.raises(NotMultiHomogeneous):
        validate_proper(ProperFormula(blocks, 0, Atom(broken)))
