"""Linear pieces, their classes, and the point-counting oracle."""
from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from cohomqe.errors import (
    BudgetExceeded,
    MixedBlockAtom,
    NegativeCoefficient,
    NonLinearAtom,
    NotPolynomialCount,
    PieceLimitExceeded,
    PrimeRequired,
)
from cohomqe.formula import parse_formula
from cohomqe.joinctor import build_join_formula
from cohomqe.motivic import (
    GrothClass,
    LinearPiece,
    class_from_counts,
    class_to_P,
    class_to_Q,
    count_points,
    formula_class,
    formula_to_pieces,
    intersect_pieces,
    interpolate,
    pieces_class,
    project_pieces,
)
from cohomqe.polyring import IntPoly, qpoly_multiproj

from conftest import TWO_LINES, TWO_POINTS

P = IntPoly


def pt(a, b):
    return LinearPiece.from_equations((1,), {0: [[b, -a]]})


def test_example_join_two_pieces(eg_psi):
    pieces = formula_to_pieces(build_join_formula(eg_psi))
    assert len(pieces) == 2
    assert sorted(p.dims for p in pieces) == [(0, 3, 17, 17, 17, 17), (0, 3, 35, 35, 35, 35)]
    image = project_pieces(pieces, [0])
    assert len(image) == 2 and pieces_class(image).poly_in_L == P([2])


def test_two_hyperplanes():
    pieces = formula_to_pieces(parse_formula("(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))"))
    assert [p.dims for p in pieces] == [(1,), (1,)]


def test_nonlinear_and_mixed():
    with pytest.raises(NonLinearAtom):
        formula_to_pieces(parse_formula("(blocks (x 1)) (=0 (* x0_0 x0_1))"))
    with pytest.raises(MixedBlockAtom):
        formula_to_pieces(parse_formula("(blocks (x 1) (x 1)) (=0 (* x0_0 x1_1))"))


def test_piece_cap():
    text = "(blocks (x 3) (x 3)) (and " + " ".join(
        f"(or (=0 x0_{i}) (=0 x1_{i}))" for i in range(4)) + ")"
    f = parse_formula(text)
    assert len(formula_to_pieces(f)) > 4
    with pytest.raises(PieceLimitExceeded):
        formula_to_pieces(f, cap=4)


def test_intersections():
    assert intersect_pieces(pt(1, 0), pt(0, 1)) is None
    a = LinearPiece.from_equations((1, 1), {1: [[1, 0]]})
    b = LinearPiece.from_equations((1, 1), {0: [[0, 1]]})
    c = intersect_pieces(a, b)
    assert c.dims == (0, 0)
    assert intersect_pieces(a, a) == a


def test_class_examples():
    assert pieces_class([LinearPiece.full((1, 1))]).poly_in_L == P([1, 2, 1])
    assert pieces_class([pt(1, 0), pt(0, 1)]).poly_in_L == P([2])
    lines = formula_to_pieces(parse_formula(TWO_LINES))
    assert pieces_class(lines).poly_in_L == P([1, 2])
    assert pieces_class(lines, "subsets").poly_in_L == P([1, 2])


def test_class_to_polys():
    c = GrothClass(P([1, 2]))
    assert class_to_Q(c) == P([1, 2]) and class_to_P(c) == P([1, 0, 2])
    assert class_to_Q(GrothClass(P([2]))) == P([2]) == class_to_P(GrothClass(P([2])))
    with pytest.raises(NegativeCoefficient):
        class_to_Q(GrothClass(P([1, -1])))


def test_example_join_class(eg_psi):
    from test_fop import example_qJ
    c = formula_class(build_join_formula(eg_psi))
    assert class_to_Q(c) == example_qJ()


def test_project():
    piece = LinearPiece.from_equations((1, 7), {0: [[1, -1]]})
    (img,) = project_pieces([piece], [0])
    assert img.dims == (0,)
    assert project_pieces([], [0]) == []


def test_count_examples():
    full = parse_formula("(blocks (x 1) (x 1)) (and)")
    assert count_points(full, 3) == 16
    assert count_points(parse_formula("(blocks (x 1)) (=0 x0_0)"), 2) == 1
    assert count_points(parse_formula(TWO_LINES), 5) == 11


def test_count_errors():
    f = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* 3 x0_1)))")
    with pytest.raises(PrimeRequired):
        count_points(f, 4)
    with pytest.raises(PrimeRequired):
        count_points(f, 3)
    with pytest.raises(BudgetExceeded):
        count_points(parse_formula("(blocks (x 6)) (and)"), 7, budget=1000)


def test_class_from_counts_examples():
    assert class_from_counts(parse_formula("(blocks (x 1)) (=0 x0_0)"), [2, 3]).poly_in_L == P([1])
    assert class_from_counts(parse_formula("(blocks (x 2)) (and)"), [2, 3, 5]).poly_in_L == \
        P([1, 1, 1])
    assert class_from_counts(parse_formula(TWO_LINES), [2, 3, 5]).poly_in_L == P([1, 2])
    with pytest.raises(NotPolynomialCount):
        class_from_counts(parse_formula(TWO_LINES), [2, 3])


def test_nonpolynomial_count_detected():
    # x0^2 + x1^2 = 0 on P^1 has 0, 2, 0 points over F_3, F_5, F_7
    f = parse_formula("(blocks (x 1)) (=0 (+ (* x0_0 x0_0) (* x0_1 x0_1)))")
    assert [count_points(f, q) for q in (3, 5, 7)] == [0, 2, 0]
    with pytest.raises(NotPolynomialCount):
        class_from_counts(f, [3, 5, 7])


def test_interpolate():
    assert interpolate([2, 3, 5], [7, 13, 31]) == [1, 1, 1]


def test_threads_do_not_change_counts():
    f = parse_formula(TWO_POINTS.replace("(x 1)", "(x 1) (x 2)"))
    assert count_points(f, 5, threads=1) == count_points(f, 5, threads=3) == 2 * 31


def test_full_space_class():
    for dims in [(0,), (2,), (1, 3), (2, 0, 1)]:
        c = pieces_class([LinearPiece.full(dims)])
        assert class_to_Q(c) == qpoly_multiproj(dims)


# random formulas in the oracle's scope

@st.composite
def linear_formulas(draw, max_dims=2, max_blocks=2):
    dims = draw(st.lists(st.integers(0, max_dims), min_size=1, max_size=max_blocks))
    names = [(b, c) for b, n in enumerate(dims) for c in range(n + 1)]

    def atom():
        b = draw(st.integers(0, len(dims) - 1))
        k = draw(st.integers(1, dims[b] + 1))
        coords = draw(st.lists(st.integers(0, dims[b]), min_size=k, max_size=k, unique=True))
        terms = []
        for c in coords:
            s = draw(st.sampled_from([1, -1]))
            terms.append(f"x{b}_{c}" if s == 1 else f"(* -1 x{b}_{c})")
        return "(=0 " + (terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")") + ")"

    def clause(depth):
        if depth == 0 or draw(st.booleans()):
            return atom()
        head = draw(st.sampled_from(["and", "or"]))
        kids = [clause(depth - 1) for _ in range(draw(st.integers(1, 3)))]
        return f"({head} " + " ".join(kids) + ")"

    decl = " ".join(f"(x {n})" for n in dims)
    return parse_formula(f"(blocks {decl}) {clause(3)}")


@settings(max_examples=40, deadline=None)
@given(linear_formulas())
def test_counts_match_class(f):
    c = formula_class(f)
    for q in (3, 5):
        assert count_points(f, q) == c.evaluate(q)


@settings(max_examples=40, deadline=None)
@given(linear_formulas())
def test_scissor_matches_subsets(f):
    pieces = formula_to_pieces(f)
    assert pieces_class(pieces).poly_in_L == pieces_class(pieces, "subsets").poly_in_L


@settings(max_examples=40, deadline=None)
@given(linear_formulas())
def test_additive_on_disjoint_lists(f):
    pieces = formula_to_pieces(f)
    disjoint = all(intersect_pieces(a, b) is None
                   for i, a in enumerate(pieces) for b in pieces[i + 1:])
    if disjoint:
        total = sum((p.class_in_L() for p in pieces), P())
        assert pieces_class(pieces).poly_in_L == total
