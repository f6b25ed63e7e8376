"""
Diagnostics comparing join-based information on projections with other routes.

* the fibre-power (hypercover) estimate versus the join computation for the
  projection ``P^1 x P^n -> P^n``;
* telescoped Betti sums read off a relative join;
* the Betti numbers forced on an image by a join-connectivity argument;
* exact verifiers of the join congruence and join connectivity on linear
  instances, using the Betti oracle of :mod:`cohomqe.cohomology`.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .cohomology import pieces_poincare
from .errors import InsufficientDegrees, InvalidArgument, BlockMismatch
from .formula import ProperFormula
from .joinctor import multijoin_formula, relative_join_formula
from .motivic import formula_to_pieces, project_pieces
from .polyring import IntPoly, qpoly_multiproj, substitute_t_power


# ---------------------------------------------------------------------------
# exponential gap


def hypercover_terms(n: int) -> list[int]:
    """Per fibre-power contributions ``sum_{j <= 2(n-p)} C(2p+1, j)`` for p = 0..n."""
    if n < 1:
        raise InvalidArgument("n must be >= 1", n=n)
    return [sum(comb(2 * p + 1, j) for j in range(2 * (n - p) + 1)) for p in range(n + 1)]


def hypercover_sum_example(n: int) -> int:
    """Fibre-power estimate for ``b_{2n}`` of the image of ``P^1 x P^n``."""
    return sum(hypercover_terms(n))


def join_side_example(n: int) -> int:
    """``b_{2n}(P^{4n+3} x P^n) = n + 1``, checked against the polynomial expansion."""
    if n < 1:
        raise InvalidArgument("n must be >= 1", n=n)
    P = substitute_t_power(qpoly_multiproj((4 * n + 3, n)), 2)
    value = n + 1
    if P[2 * n] != value:
        raise AssertionError(f"coefficient of T^{2 * n} is {P[2 * n]}, expected {value}")
    return value


@dataclass(frozen=True)
class ComparisonReport:
    n: int
    hypercover_value: int
    join_value: int
    hypercover_terms: tuple[int, ...] = ()

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.hypercover_value, self.join_value)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "hypercover": str(self.hypercover_value), "join": str(self.join_value),
            "ratio": str(self.ratio), "terms": [str(t) for t in self.hypercover_terms],
        }


def gap_report(n: int) -> ComparisonReport:
    terms = hypercover_terms(n)
    return ComparisonReport(n, sum(terms), join_side_example(n), tuple(terms))


def gap_table(n_max: int, n_min: int = 1) -> list[ComparisonReport]:
    return [gap_report(n) for n in range(n_min, n_max + 1)]


# ---------------------------------------------------------------------------
# telescoped sums and the join-defect statement


def telescoped_betti_sums(betti, p: int) -> tuple[int, int]:
    """``(sum_{2i<p} b_{2i}, sum_{2i-1<p} b_{2i-1})`` of an image from its relative join.

    ``betti`` lists the Betti numbers of the ``p``-fold relative join (an
    :class:`IntPoly` is taken as complete); ``p`` must be odd.
    """
    if p < 1 or p % 2 == 0:
        raise InvalidArgument("p must be an odd positive integer", p=p)
    if not isinstance(betti, IntPoly):
        betti = list(betti)
        if len(betti) < p:
            raise InsufficientDegrees(f"need Betti numbers up to degree {p - 1}, got {len(betti)}",
                                      needed=p, given=len(betti))
        betti = IntPoly(betti)
    return betti[p - 1], (betti[p - 2] if p >= 2 else 0)


@dataclass(frozen=True)
class JoinDefect:
    betti: tuple[int, ...]
    threshold: int
    p_max: int
    slack: int    # p + n - (p + 1) r at p = p_max

    def to_dict(self) -> dict:
        return {"betti": list(self.betti), "threshold": self.threshold, "p_max": self.p_max,
                "slack": self.slack}


def defect_threshold_scan(n: int, r: int) -> int:
    """Smallest integer ``p`` in ``[0, n]`` maximizing ``min(p, n - r - p (r - 1))``."""
    best, arg = None, None
    for p in range(n + 1):
        v = min(p, n - r - p * (r - 1))
        if best is None or v > best:
            best, arg = v, p
    return arg


def join_defect_betti(N: int, n: int, r: int) -> JoinDefect:
    """Low Betti numbers of the image of a projection to ``P^n`` with ``r``-codimensional data.

    For ``X`` in ``P^N x P^n`` with the hypotheses of the join-defect statement
    (local complete intersection, finite fibres, asserted by the caller), the
    image has ``b_i = 1`` for even and ``0`` for odd ``i`` below ``floor((n-r)/r)``.
    """
    if N < 0:
        raise InvalidArgument("N must be >= 0", N=N)
    if not n > r >= 1:
        raise InvalidArgument("need n > r >= 1", n=n, r=r)
    t = (n - r) // r
    if t <= 0:
        raise InvalidArgument(f"empty range: floor((n-r)/r) = {t}", n=n, r=r)
    return JoinDefect(tuple(1 - i % 2 for i in range(t)), t, t, t + n - (t + 1) * r)


# ---------------------------------------------------------------------------
# verifiers


@dataclass
class VerificationReport:
    name: str
    holds: bool
    p: int
    lhs: IntPoly
    rhs: IntPoly
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"check": self.name, "holds": self.holds, "p": self.p,
                "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(),
                "details": self.details}


def _truncate(P: IntPoly, k: int) -> IntPoly:
    return IntPoly(P.coeffs[:max(k, 0)])


def verify_poincare_congruence(psi: ProperFormula, p: int, face_cap: int | None = None
                               ) -> VerificationReport:
    """Check ``P(J^[p](X)) = P(pi(X)) (1 + T^2 + ... ) mod T^p`` exactly.

    ``X`` lives in ``P^base x P^n`` (one free block, one bound block) and
    ``pi`` projects to the free block.
    """
    if p < 1:
        raise InvalidArgument("p must be >= 1", p=p)
    if psi.free_count != 1 or psi.bound_count != 1:
        raise BlockMismatch("need exactly one free and one bound block")
    start = time.perf_counter()
    kw = {} if face_cap is None else {"face_cap": face_cap}
    n = psi.blocks.dims[1]
    pieces = formula_to_pieces(psi.quantifier_free())
    J = relative_join_formula(psi, p)
    lhs = _truncate(pieces_poincare(formula_to_pieces(J), max_degree=p - 1, **kw), p)
    image = project_pieces(pieces, [0]) if pieces else []
    P_image = pieces_poincare(image, max_degree=p - 1, **kw)
    fibre = substitute_t_power(qpoly_multiproj(((p + 1) * (n + 1) - 1,)), 2)
    rhs = _truncate(P_image * fibre, p)
    return VerificationReport("poincare-congruence", lhs == rhs, p, lhs, rhs,
                              {"image": P_image.to_json(), "pieces": len(pieces)},
                              time.perf_counter() - start)


def verify_join_connectivity(psi: ProperFormula, p: int, face_cap: int | None = None
                             ) -> VerificationReport:
    """Check that the ``p``-fold self-join of ``X`` in ``P^n`` looks like projective space below ``p``.

    ``b_j(J) = b_j(P^{(p+1)(n+1)-1})`` for ``j < p`` and ``b_p(J) >= b_p`` of it.
    """
    if p < 1:
        raise InvalidArgument("p must be >= 1", p=p)
    if len(psi.blocks) != 1:
        raise BlockMismatch("connectivity check needs a single-block formula")
    if not formula_to_pieces(psi.quantifier_free()):
        raise InvalidArgument("the formula has an empty realization")
    start = time.perf_counter()
    kw = {} if face_cap is None else {"face_cap": face_cap}
    n = psi.blocks.dims[0]
    J = multijoin_formula([psi] * (p + 1))
    lhs = pieces_poincare(formula_to_pieces(J), max_degree=p, **kw)
    ambient = (p + 1) * (n + 1) - 1
    rhs = _truncate(substitute_t_power(qpoly_multiproj((ambient,)), 2), p + 1)
    holds = all(lhs[j] == rhs[j] for j in range(p)) and lhs[p] >= rhs[p]
    return VerificationReport("join-connectivity", holds, p, lhs, rhs,
                              {"ambient": ambient}, time.perf_counter() - start)


def betti_list(P: IntPoly, upto: int) -> list[int]:
    return [P[k] for k in range(upto + 1)]


