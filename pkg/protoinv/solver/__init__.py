"""Satisfiability services over ground instances."""

from .queries import InitCheck, QueryResult, StepContext, check_sat, implies, one_step_query, shrink_cube
from .runtime import Cvc5RuntimeAdapter, SolverRuntimeAdapter, Z3RuntimeAdapter, runtime_for
from .session import CheckResult, SmtSession, SolverSession, Status, open_session
from .transport import EmbeddedTransport, ProcessTransport, SolverTransport, Transcript
from .worker import SessionStats, SolverWorkerState

__all__ = [
    "CheckResult",
    "Cvc5RuntimeAdapter",
    "EmbeddedTransport",
    "InitCheck",
    "ProcessTransport",
    "QueryResult",
    "SessionStats",
    "SmtSession",
    "SolverRuntimeAdapter",
    "SolverSession",
    "SolverTransport",
    "SolverWorkerState",
    "Status",
    "StepContext",
    "Transcript",
    "Z3RuntimeAdapter",
    "check_sat",
    "implies",
    "one_step_query",
    "open_session",
    "runtime_for",
    "shrink_cube",
]
