"""Semantic error hierarchy shared by the engine, the sampler and the CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .validators import ValidationReport


class BellSimError(Exception):
    """Base error for this package."""


class InvalidModelError(BellSimError, ValueError):
    """A model, policy or behavior failed validation."""

    def __init__(self, report: "ValidationReport", subject: str = "input"):
        self.report = report
        self.subject = subject
        codes = ", ".join(sorted({violation.code for violation in report.violations}))
        super().__init__(f"Invalid {subject}: {codes}")


class ModelFormatError(BellSimError, ValueError):
    """A model document or model reference could not be parsed."""


class UnknownModelError(BellSimError, KeyError):
    """A builtin name is not in the registry."""

    code = "UNKNOWN_NAME"

    def __init__(self, name: str, known: tuple[str, ...] = ()):
        self.name = name
        self.known = known
        super().__init__(name)

    def __str__(self) -> str:
        allowed = ", ".join(self.known)
        return f"{self.code}: {self.name!r} (known: {allowed})"


class MissingParamError(BellSimError, ValueError):
    """A builtin constructor was called without a required parameter."""

    code = "MISSING_PARAM"

    def __init__(self, builtin: str, param: str):
        self.builtin = builtin
        self.param = param
        super().__init__(f"{self.code}: {builtin!r} requires parameter {param!r}")


class OutOfRangeError(BellSimError, ValueError):
    """A scalar argument lies outside its documented domain."""


class NotLocalError(BellSimError, TypeError):
    """The input has no local hidden-variable representation (a bare behavior)."""

    code = "NOT_DECOMPOSABLE"


class EmptyCellError(BellSimError, ValueError):
    """A setting pair has no trials, so its correlation is undefined."""

    code = "EMPTY_CELL"

    def __init__(self, a: int, b: int):
        self.a = a
        self.b = b
        super().__init__(f"{self.code}({a},{b}): no trials with A={a}, B={b}")


class SpreadsheetSchemaError(BellSimError, ValueError):
    """A spreadsheet row or header violates the CSV schema."""

    def __init__(self, row: int, column: str, message: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: {message}")


__all__ = [
    "BellSimError",
    "InvalidModelError",
    "ModelFormatError",
    "UnknownModelError",
    "MissingParamError",
    "OutOfRangeError",
    "NotLocalError",
    "EmptyCellError",
    "SpreadsheetSchemaError",
]
