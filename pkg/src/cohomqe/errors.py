"""Exception hierarchy shared by every module.

All errors carry a short machine-readable ``kind`` (the class name) and an
optional ``details`` mapping, which the command line front end dumps as JSON.
"""

from __future__ import annotations


class CohomQEError(Exception):
    """Base class for every error raised by the package."""

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        out = {"error": self.kind, "message": self.message}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in sorted(self.details.items())}
        return out


def _plain(value):
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value if isinstance(value, (str, bool, type(None), float)) else str(value)


class InvalidArgument(CohomQEError, ValueError):
    pass


# polyring / fop
class DegreeTooHigh(CohomQEError, ValueError):
    pass


class LengthMismatch(CohomQEError, ValueError):
    pass


class UnexpectedValue(CohomQEError, ValueError):
    pass


# formula
class FormulaSyntaxError(CohomQEError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})", line=line, column=column)
        self.line = line
        self.column = column


class ValidationError(CohomQEError, ValueError):
    pass


class NotMultiHomogeneous(ValidationError):
    pass


class NegationPresent(ValidationError):
    pass


class BlockMismatch(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


# motivic
class NonLinearAtom(CohomQEError, ValueError):
    pass


class MixedBlockAtom(CohomQEError, ValueError):
    pass


class PieceLimitExceeded(CohomQEError, RuntimeError):
    pass


class BudgetExceeded(CohomQEError, RuntimeError):
    pass


class PrimeRequired(CohomQEError, ValueError):
    pass


class NotPolynomialCount(CohomQEError, ValueError):
    pass


class NegativeCoefficient(CohomQEError, ValueError):
    pass


# compare
class InsufficientDegrees(CohomQEError, ValueError):
    pass
