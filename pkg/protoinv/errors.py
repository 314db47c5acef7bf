"""Stable error taxonomy shared by every protoinv module."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class ErrorCategory(str, Enum):
    INPUT = "input"
    GROUNDING = "grounding"
    SOLVER = "solver"
    BUDGET = "budget"
    INTERNAL = "internal"


_INPUT_CODES = frozenset({
    "parse_error",
    "sort_error",
    "validation_failed",
    "mapping_error",
    "config_invalid",
    "unknown_protocol",
    "trace_invalid",
})
_GROUNDING_CODES = frozenset({
    "grounding_failed",
    "axiom_violated",
    "size_invalid",
    "unassigned_atom",
})
_SOLVER_CODES = frozenset({
    "solver_unavailable",
    "solver_transport",
    "solver_timeout",
    "solver_protocol",
})


def category_for_error_code(code: str | None) -> ErrorCategory:
    """Map one error code to its stable category."""

    normalized = (code or "").strip().lower()
    if normalized in _INPUT_CODES:
        return ErrorCategory.INPUT
    if normalized in _GROUNDING_CODES:
        return ErrorCategory.GROUNDING
    if normalized in _SOLVER_CODES:
        return ErrorCategory.SOLVER
    if normalized == "budget_exceeded":
        return ErrorCategory.BUDGET
    return ErrorCategory.INTERNAL


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int | None = None
    column: int | None = None
    severity: str = "error"

    def render(self) -> str:
        where = ""
        if self.line is not None:
            where = f"{self.line}:{self.column or 0}: "
        return f"{where}{self.severity}: {self.message} [{self.code}]"


class ProtoinvError(RuntimeError):
    code = "internal_error"

    def __init__(self, message: str, *, code: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code

    @property
    def category(self) -> ErrorCategory:
        return category_for_error_code(self.code)

    def detail(self) -> dict[str, Any]:
        return {
            "category": self.category.value,
            "code": self.code,
            "message": self.message,
        }


class ParseError(ProtoinvError):
    code = "parse_error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        location = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class SortError(ProtoinvError):
    code = "sort_error"


class ValidationError(ProtoinvError):
    code = "validation_failed"

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        rendered = "; ".join(item.render() for item in diagnostics[:5])
        super().__init__(f"protocol failed validation: {rendered}")
        self.diagnostics = diagnostics


class GroundingError(ProtoinvError):
    code = "grounding_failed"


class UnassignedAtomError(GroundingError):
    code = "unassigned_atom"

    def __init__(self, atom: str) -> None:
        super().__init__(f"state does not assign atom {atom}")
        self.atom = atom


class SolverError(ProtoinvError):
    code = "solver_transport"


class SolverTransportError(SolverError):
    code = "solver_transport"

    def __init__(self, message: str, *, stderr: str = "", code: str | None = None) -> None:
        super().__init__(message, code=code)
        self.stderr = stderr


class SolverTimeoutError(SolverError):
    code = "solver_timeout"


class SolverProtocolError(SolverError):
    code = "solver_protocol"


class MappingError(ProtoinvError):
    code = "mapping_error"


class ConfigError(ProtoinvError):
    code = "config_invalid"


class BudgetExceeded(ProtoinvError):
    code = "budget_exceeded"

    def __init__(self, message: str, *, resource: str) -> None:
        super().__init__(message)
        self.resource = resource


EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_CERTIFICATION_FAILED = 2
EXIT_ERROR = 3
EXIT_INTERRUPTED = 130


def exit_code_for(error: BaseException) -> int:
    """CLI exit code for an error that escaped a command."""

    if isinstance(error, KeyboardInterrupt):
        return EXIT_INTERRUPTED
    return EXIT_ERROR


__all__ = [
    "BudgetExceeded",
    "ConfigError",
    "Diagnostic",
    "EXIT_CERTIFICATION_FAILED",
    "EXIT_COUNTEREXAMPLE",
    "EXIT_ERROR",
    "EXIT_INTERRUPTED",
    "EXIT_OK",
    "ErrorCategory",
    "GroundingError",
    "MappingError",
    "ParseError",
    "ProtoinvError",
    "SolverError",
    "SolverProtocolError",
    "SolverTimeoutError",
    "SolverTransportError",
    "SortError",
    "UnassignedAtomError",
    "ValidationError",
    "category_for_error_code",
    "exit_code_for",
]
