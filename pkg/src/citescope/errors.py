"""Exception hierarchy shared by all citescope modules."""

from __future__ import annotations


class CitescopeError(Exception):
    """Base class for every error raised deliberately by citescope."""


class ParseError(CitescopeError, ValueError):
    """A cell or line could not be parsed; carries a 1-based location."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DuplicateLabelError(CitescopeError, ValueError):
    def __init__(self, label: str, axis: str):
        self.label = label
        self.axis = axis
        super().__init__(f"duplicate {axis} label: {label!r}")


class DomainError(CitescopeError, ValueError):
    """A syntactically valid value outside its allowed domain (negative, fractional, ...)."""


class LabelNotFoundError(CitescopeError, KeyError):
    def __init__(self, label: str, axis: str):
        self.label = label
        self.axis = axis
        super().__init__(f"journal {label!r} not found on the {axis} axis")

    def __str__(self) -> str:
        return self.args[0]


class EmptyEnvironmentError(CitescopeError, ValueError):
    pass


class ZeroVarianceError(CitescopeError, ValueError):
    pass


class ConvergenceError(CitescopeError, ArithmeticError):
    pass
