"""Outcomes of a proof attempt: an invariant, a counterexample, or an explicit give-up."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from ..boost.assertions import QuantifiedAssertion
from ..grounding.clauses import Clause
from ..grounding.evaluate import State


@dataclass(frozen=True)
class Proof:
    """`property ∧ assertions` is inductive at `instance`.

    `clauses` pairs each assertion with the ground clauses it summarises.
    """

    instance: str
    assertions: tuple[QuantifiedAssertion, ...]
    clauses: tuple[frozenset[Clause], ...]
    frame: int
    statistics: dict[str, Any] = field(default_factory=dict)

    status = "proved"

    @property
    def ground_clauses(self) -> int:
        return sum(len(item) for item in self.clauses)


@dataclass(frozen=True)
class TraceStep:
    state: State
    action: Optional[str] = None


@dataclass(frozen=True)
class Trace:
    """Initial state first; each later step names the action that produced it."""

    instance: str
    steps: tuple[TraceStep, ...]
    statistics: dict[str, Any] = field(default_factory=dict)

    status = "counterexample"

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def states(self) -> list[State]:
        return [step.state for step in self.steps]


@dataclass(frozen=True)
class Inconclusive:
    instance: str
    reason: str
    resource: str
    frame: int
    statistics: dict[str, Any] = field(default_factory=dict)

    status = "inconclusive"


Outcome = Union[Proof, Trace, Inconclusive]

__all__ = ["Inconclusive", "Outcome", "Proof", "Trace", "TraceStep"]
