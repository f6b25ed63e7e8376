"""
Exact univariate polynomials over the integers.

An :class:`IntPoly` is a dense tuple of Python ints in ascending degree, so
``IntPoly([1, 0, 2])`` is ``1 + 2T^2``.  Trailing zeros are stripped on
construction and the zero polynomial is the empty tuple.

Besides ring arithmetic this module holds the handful of named polynomial maps
the quantifier-elimination pipeline is built from: reversal, truncation,
the even/odd "pseudo" map and the pseudo-Poincare polynomial of a product of
projective spaces.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import DegreeTooHigh, InvalidArgument


class IntPoly:
    """A polynomial in ``T`` with arbitrary-precision integer coefficients.

    >>> IntPoly([1, 1]) * IntPoly([1, -1])
    IntPoly([1, 0, -1])
    >>> IntPoly([0, 0]).degree
    -1
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)
        self._hash = None

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls([c])

    @classmethod
    def monomial(cls, i: int, c: int = 1) -> IntPoly:
        return cls([0] * i + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        """Coefficient of ``T^i``; zero outside the stored range."""
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                var = "T" if i == 1 else f"T^{i}"
                body = var if mag == 1 else f"{mag}{var}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __add__(self, other):
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return poly_add(self, -_coerce(other))

    def __rsub__(self, other):
        return poly_add(_coerce(other), -self)

    def __mul__(self, other):
        return poly_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidArgument("negative power of a polynomial")
        result, base = IntPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, z: int) -> int:
        return poly_eval_int(self, z)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> IntPoly:
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, dict):
            data = data["poly"]
        return cls(int(x) for x in data)


def _coerce(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly([x])
    raise TypeError(f"cannot use {type(x).__name__} as IntPoly")


@dataclass(frozen=True)
class BlockSignature:
    """Projective dimensions ``(n_1, ..., n_m)`` of the factors of a product of projective spaces.

    The empty signature (a single point) is allowed; it shows up as the free
    part of a sentence.
    """

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int] = ()):
        dims = tuple(int(n) for n in dims)
        if any(n < 0 for n in dims):
            raise InvalidArgument(f"block dimensions must be nonnegative, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def ncoords(self) -> int:
        """Number of homogeneous coordinates over all blocks."""
        return sum(n + 1 for n in self.dims)

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for n in self.dims:
            out.append(acc)
            acc += n + 1
        return out

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, i):
        return self.dims[i]

    def __str__(self):
        return "(" + ",".join(str(n) for n in self.dims) + ")"


def as_signature(sig) -> BlockSignature:
    return sig if isinstance(sig, BlockSignature) else BlockSignature(sig)


def poly_add(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a.coeffs), len(b.coeffs))
    return IntPoly(a[i] + b[i] for i in range(n))


def poly_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if a.is_zero() or b.is_zero():
        return IntPoly()
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return IntPoly(out)


def poly_reverse(q: IntPoly, e: int) -> IntPoly:
    """Return ``T^e q(1/T)``; requires ``deg q <= e``."""
    if q.degree > e:
        raise DegreeTooHigh(f"cannot reverse degree {q.degree} polynomial within degree {e}",
                            degree=q.degree, bound=e)
    return IntPoly(q[e - i] for i in range(e + 1))


def poly_trunc(q: IntPoly, m: int) -> IntPoly:
    return IntPoly(q.coeffs[: m + 1])


def poly_eval_int(q: IntPoly, z: int) -> int:
    acc = 0
    for c in reversed(q.coeffs):
        acc = acc * z + c
    return acc


def projective_q(n: int) -> IntPoly:
    """``1 + T + ... + T^n``."""
    return IntPoly([1] * (n + 1))


def qpoly_multiproj(sig: Sequence[int] | BlockSignature) -> IntPoly:
    result = IntPoly([1])
    for n in as_signature(sig):
        result = result * projective_q(n)
    return result


def even_part(p: IntPoly) -> IntPoly:
    return IntPoly(p.coeffs[0::2])


def odd_part(p: IntPoly) -> IntPoly:
    return IntPoly(p.coeffs[1::2])


def pseudo(p: IntPoly) -> IntPoly:
    """Map a Poincare polynomial ``P`` to ``P_even(T) - T * P_odd(T)``."""
    return even_part(p) - IntPoly.monomial(1) * odd_part(p)


def substitute_t_power(p: IntPoly, k: int) -> IntPoly:
    """``p(T^k)``."""
    out = [0] * (k * p.degree + 1) if p.coeffs else []
    for i, c in enumerate(p.coeffs):
        out[k * i] = c
    return IntPoly(out)


def one_minus_t_pow(n: int) -> IntPoly:
    if n < 0:
        raise InvalidArgument("exponent must be nonnegative", n=n)
    return IntPoly((-1) ** k * comb(n, k) for k in range(n + 1))


def is_palindromic(q: IntPoly, e: int) -> bool:
    return q.degree <= e and poly_reverse(q, e) == q
