"""Diagnostics and exceptions shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """A positioned message about a source text.

    Lines and columns are 1-based. Severity is ``"error"`` or ``"warning"``;
    warnings never block evaluation, errors do.
    """

    line: int
    column: int
    message: str
    severity: str = "error"

    def format(self, filename: str | None = None) -> str:
        prefix = f"{filename}:" if filename else ""
        return f"{prefix}{self.line}:{self.column}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "line": self.line,
            "column": self.column,
            "message": self.message,
            "severity": self.severity,
        }


class ParseFailed(Exception):
    """Raised when a source text cannot be parsed into a document.

    Carries at least one :class:`Diagnostic` with position information.
    """

    def __init__(self, diagnostics: list[Diagnostic]):
        assert diagnostics, "ParseFailed requires at least one diagnostic"
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.format() for d in self.diagnostics))


@dataclass
class ValidationFailed(Exception):
    """Raised by operations whose precondition is a validated document."""

    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __str__(self) -> str:
        return "; ".join(d.format() for d in self.diagnostics)


class MixedCurrencyError(ValueError):
    """A comparison or sum mixed two currencies; no conversion is defined."""


class ExpansionLimitError(ValueError):
    """The variant space of a description exceeds the hard expansion cap."""
