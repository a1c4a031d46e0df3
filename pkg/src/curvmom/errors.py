"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CurvmomError(Exception):
    """Base class for all package errors."""


class ChartError(CurvmomError, ValueError):
    """Malformed chart source: lexing, parsing or semantic validation."""


class LexError(ChartError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ParseError(ChartError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ChartSemanticError(ChartError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class DomainError(CurvmomError, ArithmeticError):
    """A function was evaluated outside its domain (log of 0, 1/0, ...)."""

    def __init__(self, message: str, subexpr: str | None = None):
        self.message = message
        self.subexpr = subexpr
        super().__init__(self._render())

    def _render(self) -> str:
        if self.subexpr is None:
            return self.message
        return f"{self.message} in `{self.subexpr}`"

    def with_subexpr(self, subexpr: str) -> "DomainError":
        if self.subexpr is None:
            self.subexpr = subexpr
            self.args = (self._render(),)
        return self


class SingularChartPoint(CurvmomError, ArithmeticError):
    """The Jacobian of the embedding is (numerically) rank deficient."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class NotOrthogonalSlice(CurvmomError, ValueError):
    """The chosen normal coordinate is not orthogonal to the others."""


class GridError(CurvmomError, ValueError):
    """Inconsistent grid specification or mismatched fields."""
