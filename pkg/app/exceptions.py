"""
Exception hierarchy shared by the library, the CLI and the HTTP layer.

Partial label operators and constructions that "do not exist" return None;
the classes below signal misuse and resource exhaustion.
"""
from typing import Optional


class SpecTheoryError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SpecTheoryError):
    """Mismatched grids, off-grid endpoints or invalid settings."""


class ParseError(SpecTheoryError):
    """Syntax error in a specification file, with its position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class SemanticError(SpecTheoryError):
    """Well-formed text describing an ill-formed system."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        super().__init__(message if line is None else f"{message} (line {line})")
        self.message = message
        self.line = line


class BudgetExceededError(SpecTheoryError):
    """A state or enumeration budget was exhausted."""

    def __init__(self, what: str, budget: int) -> None:
        super().__init__(f"{what} exceeded budget of {budget}")
        self.what = what
        self.budget = budget


class ConstructionError(SpecTheoryError):
    """A construction was required to exist but does not."""
