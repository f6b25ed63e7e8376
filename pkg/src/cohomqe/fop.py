"""
Polynomial operators that turn the pseudo-Poincare polynomial of a join
formula into that of the quantified formula.

An :class:`OperatorSpec` lists its stages outermost first, exactly as the
composite would be written; evaluation runs right to left.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DegreeTooHigh, LengthMismatch, UnexpectedValue, InvalidArgument
from .formula import EXISTS, FORALL
from .joinctor import JoinParams
from .polyring import (
    BlockSignature,
    IntPoly,
    as_signature,
    one_minus_t_pow,
    poly_reverse,
    poly_trunc,
    pseudo,
    qpoly_multiproj,
)


def rec(q: IntPoly, sig) -> IntPoly:
    """Complement operator: ``Q(P^sig) - T^|sig| q(1/T)``.  An involution."""
    sig = as_signature(sig)
    if q.degree > sig.total:
        raise DegreeTooHigh(f"Rec_{sig} needs degree <= {sig.total}, got {q.degree}",
                            degree=q.degree, bound=sig.total)
    return qpoly_multiproj(sig) - poly_reverse(q, sig.total)


@dataclass(frozen=True)
class Rec:
    sig: BlockSignature

    def __init__(self, sig):
        object.__setattr__(self, "sig", as_signature(sig))

    @property
    def domain(self) -> int:
        return self.sig.total

    def out_bound(self, bound: int) -> int:
        return self.sig.total

    def apply(self, q: IntPoly) -> IntPoly:
        return rec(q, self.sig)

    def __str__(self):
        return f"Rec_{_compact_sig(self.sig)}"


@dataclass(frozen=True)
class Trunc:
    m: int
    n: int

    @property
    def domain(self) -> int:
        return self.n

    def out_bound(self, bound: int) -> int:
        return min(self.m, bound)

    def apply(self, q: IntPoly) -> IntPoly:
        if q.degree > self.n:
            raise DegreeTooHigh(f"Trunc_{{{self.m},{self.n}}} needs degree <= {self.n}, got {q.degree}",
                                degree=q.degree, bound=self.n)
        return poly_trunc(q, self.m)

    def __str__(self):
        return f"Trunc_{{{self.m},{self.n}}}"


@dataclass(frozen=True)
class MulOneMinusTPow:
    N: int

    domain = None

    def out_bound(self, bound: int) -> int:
        return bound + self.N

    def apply(self, q: IntPoly) -> IntPoly:
        return q * one_minus_t_pow(self.N)

    def __str__(self):
        return "(1-T)" if self.N == 1 else f"(1-T)^{self.N}"


@dataclass(frozen=True)
class Pseudo:
    domain = None

    def out_bound(self, bound: int) -> int:
        return bound // 2

    def apply(self, q: IntPoly) -> IntPoly:
        return pseudo(q)

    def __str__(self):
        return "Pseudo"


Stage = Union[Rec, Trunc, MulOneMinusTPow, Pseudo]


def _compact_sig(sig: BlockSignature) -> str:
    parts: list[str] = []
    dims = list(sig.dims)
    i = 0
    while i < len(dims):
        j = i
        while j < len(dims) and dims[j] == dims[i]:
            j += 1
        run = j - i
        parts.append(str(dims[i]) if run == 1 else f"{dims[i]}^{run}")
        i = j
    return "(" + ",".join(parts) + ")"


@dataclass(frozen=True)
class OperatorSpec:
    stages: tuple[Stage, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))

    def __str__(self):
        return " o ".join(str(s) for s in self.stages) if self.stages else "id"

    def __matmul__(self, other: OperatorSpec) -> OperatorSpec:
        """Composition: ``(self @ other)(q) = self(other(q))``."""
        return OperatorSpec(self.stages + other.stages)

    def check(self, input_bound: int | None = None) -> int | None:
        """Propagate degree bounds innermost first; raise if a stage's domain can be exceeded."""
        bound = input_bound
        for k in range(len(self.stages) - 1, -1, -1):
            st = self.stages[k]
            if st.domain is not None and bound is not None and bound > st.domain:
                raise DegreeTooHigh(f"stage {k} ({st}) accepts degree <= {st.domain}, "
                                    f"previous stage may produce {bound}", stage=k)
            if bound is None:
                bound = st.domain
            if bound is not None:
                bound = st.out_bound(bound)
        return bound


def apply_operator_spec(spec: OperatorSpec, q: IntPoly, trace: list | None = None) -> IntPoly:
    for k in range(len(spec.stages) - 1, -1, -1):
        st = spec.stages[k]
        try:
            q = st.apply(q)
        except DegreeTooHigh as exc:
            raise DegreeTooHigh(f"stage {k} ({st}): {exc.message}", stage=k, **exc.details) from None
        if trace is not None:
            trace.append((k, str(st), q))
    return q


def parse_omega(word) -> tuple[str, ...]:
    """Accept ``"EA"``, ``("exists", "forall")`` or a mix; return full quantifier names."""
    out = []
    for w in word:
        if w in ("E", "e", EXISTS, "∃"):
            out.append(EXISTS)
        elif w in ("A", "a", FORALL, "∀"):
            out.append(FORALL)
        else:
            raise InvalidArgument(f"unknown quantifier {w!r}; use E/A or exists/forall")
    return tuple(out)


def omega_string(omega: Sequence[str]) -> str:
    return "".join("E" if q == EXISTS else "A" for q in omega)


def stage_operator(params: JoinParams, i: int, quantifier: str) -> OperatorSpec:
    """Stage ``i`` (1-based) of the composite for the given quantifier."""
    core = (Trunc(params.d[i - 1], params.d[i] + params.N[i - 1]), MulOneMinusTPow(params.N[i - 1]))
    if quantifier == EXISTS:
        return OperatorSpec(core)
    return OperatorSpec((Rec(params.msig[i - 1]),) + core + (Rec(params.msig[i]),))


def build_F_omega(params: JoinParams, omega) -> OperatorSpec:
    omega = parse_omega(omega)
    if len(omega) != params.n:
        raise LengthMismatch(f"quantifier word of length {len(omega)} for {params.n} bound blocks")
    spec = OperatorSpec()
    for i, q in enumerate(omega, start=1):
        spec = spec @ stage_operator(params, i, q)
    spec.check(params.d[-1])
    return spec


def qe_pseudo_poincare(qJ: IntPoly, params: JoinParams, omega, trace: list | None = None) -> IntPoly:
    if qJ.degree > params.d[-1]:
        raise DegreeTooHigh(f"join polynomial has degree {qJ.degree} > d_n = {params.d[-1]}",
                            degree=qJ.degree, bound=params.d[-1])
    return apply_operator_spec(build_F_omega(params, omega), qJ, trace)


def decide_sentence(qJ: IntPoly, params: JoinParams, omega) -> bool:
    if params.m != 0:
        raise InvalidArgument("sentence decision needs a formula without free blocks")
    value = qe_pseudo_poincare(qJ, params, omega)
    if value == IntPoly([1]):
        return True
    if value.is_zero():
        return False
    raise UnexpectedValue(f"operator produced {value}, expected 0 or 1", value=value.to_json())
