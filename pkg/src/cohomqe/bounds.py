"""
Explicit upper bounds for Euler characteristics and Betti-number sums.

``E`` bounds ``|chi_c|`` of an affine set cut out by ``r`` equations of degree
at most ``d`` in ``N`` variables; ``A`` and ``B`` turn any such ``E`` into
bounds on sums of compactly supported Betti numbers.  Every function takes
its arguments in the order (dimension, equation count, degree).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import InvalidArgument


class BoundMethod(enum.Enum):
    BOMBIERI = "bombieri"
    ADOLPHSON_SPERBER = "as"
    CHAR0 = "char0"   # only valid in characteristic zero

    @classmethod
    def parse(cls, value) -> BoundMethod:
        if isinstance(value, cls):
            return value
        for m in cls:
            if value in (m.value, m.name, m.name.lower()):
                return m
        raise InvalidArgument(f"unknown bound method {value!r}; use bombieri, as or char0")


@dataclass
class BoundResult:
    kind: str
    value: int | Fraction
    method: BoundMethod
    args: dict
    formula_trace: list = field(default_factory=list)
    ceiling: int | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind, "method": self.method.value,
            "args": {k: str(v) for k, v in self.args.items()},
            "value": str(self.value),
            "trace": [[name, [str(a) for a in args], str(v)] for name, args, v in self.formula_trace],
        }
        if self.ceiling is not None:
            out["ceiling"] = str(self.ceiling)
        return out


def _need(cond: bool, msg: str, **details):
    if not cond:
        raise InvalidArgument(msg, **details)


def _method(method, char0: bool) -> BoundMethod:
    method = BoundMethod.parse(method)
    if method is BoundMethod.CHAR0 and not char0:
        raise InvalidArgument("the char0 bound needs the characteristic-zero flag (char0=True)")
    return method


def _note(trace, name, args, value):
    if trace is not None:
        trace.append((name, args, value))
    return value


def euler_bound(N: int, r: int, d: int, method="as", *, char0: bool = False,
                trace: list | None = None) -> int:
    _need(N >= 1 and r >= 1 and d >= 0, "euler_bound needs N >= 1, r >= 1, d >= 0", N=N, r=r, d=d)
    method = _method(method, char0)
    if method is BoundMethod.BOMBIERI:
        value = (4 * (1 + d) + 5) ** (N + r)
    elif method is BoundMethod.ADOLPHSON_SPERBER:
        value = 2 ** r * (r + 1 + r * d) ** N
    else:
        value = 2 ** r * (1 + r * d) * (1 + 2 * r * d) ** (2 * N + 1)
    return _note(trace, "E", (N, r, d), value)


def katz_A(N: int, r: int, d: int, method="as", *, char0: bool = False,
           trace: list | None = None) -> int:
    _need(N >= 1, "katz_A needs N >= 1", N=N)
    value = euler_bound(N, r, d, method, char0=char0, trace=trace) + 2
    value += 2 * sum(euler_bound(n, r, d, method, char0=char0, trace=trace) for n in range(1, N))
    return _note(trace, "A", (N, r, d), value)


def katz_B(N: int, r: int, d: int, method="as", *, char0: bool = False,
           trace: list | None = None) -> int:
    """``1 + sum over nonempty S of A(N+1, 1, 1 + d|S|)``, grouped by ``|S|``."""
    _need(N >= 0 and r >= 1 and d >= 0, "katz_B needs N >= 0, r >= 1, d >= 0", N=N, r=r, d=d)
    value = 1 + sum(comb(r, s) * katz_A(N + 1, 1, 1 + d * s, method, char0=char0, trace=trace)
                    for s in range(1, r + 1))
    return _note(trace, "B", (N, r, d), value)


def katz_B_subsets(N: int, r: int, d: int, method="as", *, char0: bool = False) -> int:
    """Same as :func:`katz_B` but summing over every subset literally."""
    _need(N >= 0 and r >= 1 and d >= 0, "katz_B needs N >= 0, r >= 1, d >= 0", N=N, r=r, d=d)
    total = 1
    for k in range(1, r + 1):
        for S in itertools.combinations(range(r), k):
            total += katz_A(N + 1, 1, 1 + d * len(S), method, char0=char0)
    return total


def affine_betti_bound(N: int, r: int, d: int, method="as", *, char0: bool = False,
                       trace: list | None = None) -> int:
    _need(N >= 1, "affine bound needs N >= 1", N=N)
    return katz_B(N, r, d, method, char0=char0, trace=trace)


def projective_betti_bound(N: int, r: int, d: int, method="as", *, char0: bool = False,
                           trace: list | None = None) -> int:
    _need(N >= 1, "projective bound needs N >= 1", N=N)
    value = 1 + sum(katz_B(n, r, d, method, char0=char0, trace=trace) for n in range(1, N + 1))
    return _note(trace, "projective", (N, r, d), value)


def _b_tilde(k: int, r: int, d: int, method, char0, trace) -> int:
    return 1 if k == 0 else katz_B(k, r, d, method, char0=char0, trace=trace)


def biprojective_bound(N: int, M: int, r: int, d1: int, d2: int, method="as", *,
                       char0: bool = False, trace: list | None = None) -> int:
    _need(N >= 0 and M >= 0 and r >= 1 and d1 >= 0 and d2 >= 0,
          "biprojective bound needs N, M >= 0, r >= 1, degrees >= 0")
    memo: dict[int, int] = {}
    total = 0
    for i in range(N + 1):
        for j in range(M + 1):
            k = i + j
            if k not in memo:
                memo[k] = _b_tilde(k, r, d1 + d2, method, char0, trace)
            total += memo[k]
    return _note(trace, "biprojective", (N, M, r, d1, d2), total)


def image_betti_bound(N: int, M: int, r: int, d1: int, d2: int, p: int, method="as", *,
                      char0: bool = False, trace: list | None = None) -> tuple[Fraction, int]:
    """Bound on ``sum_{h<p} b_h`` of the image of the projection to the second factor.

    Returns the exact rational value and its ceiling.
    """
    _need(p >= 1, "image bound needs p >= 1", p=p)
    inner = biprojective_bound((N + 1) * (p + 1) - 1, M, r * (p + 1), d1, d2, method,
                               char0=char0, trace=trace)
    value = Fraction(2, p) * inner
    _note(trace, "image", (N, M, r, d1, d2, p), value)
    return value, -(-value.numerator // value.denominator)


def affine_h_bound_char0(N: int, d: int) -> int:
    """Bound on the (ordinary) Betti sum of an affine set in characteristic zero."""
    _need(N >= 1 and d >= 1, "needs N >= 1 and d >= 1", N=N, d=d)
    return d * (2 * d - 1) ** (2 * N - 1)


KINDS = ("euler", "A", "B", "affine", "projective", "biproj", "image", "h-char0")


def bound_result(kind: str, method="as", char0: bool = False, **args) -> BoundResult:
    """Evaluate one bound by name and keep the intermediate E/A/B values."""
    trace: list = []
    m = BoundMethod.parse(method)
    try:
        if kind == "euler":
            value = euler_bound(args["N"], args["r"], args["d"], m, char0=char0, trace=trace)
        elif kind == "A":
            value = katz_A(args["N"], args["r"], args["d"], m, char0=char0, trace=trace)
        elif kind == "B":
            value = katz_B(args["N"], args["r"], args["d"], m, char0=char0, trace=trace)
        elif kind == "affine":
            value = affine_betti_bound(args["N"], args["r"], args["d"], m, char0=char0, trace=trace)
        elif kind == "projective":
            value = projective_betti_bound(args["N"], args["r"], args["d"], m, char0=char0,
                                           trace=trace)
        elif kind == "biproj":
            value = biprojective_bound(args["N"], args["M"], args["r"], args["d1"], args["d2"], m,
                                       char0=char0, trace=trace)
        elif kind == "image":
            value, ceil = image_betti_bound(args["N"], args["M"], args["r"], args["d1"], args["d2"],
                                            args["p"], m, char0=char0, trace=trace)
            return BoundResult(kind, value, m, args, trace, ceil)
        elif kind == "h-char0":
            value = affine_h_bound_char0(args["N"], args["d"])
        else:
            raise InvalidArgument(f"unknown bound kind {kind!r}", choices=", ".join(KINDS))
    except KeyError as exc:
        raise InvalidArgument(f"bound {kind!r} needs argument {exc.args[0]}") from None
    return BoundResult(kind, value, m, args, trace)
