"""Independent checks of engine output: inductiveness, minimisation, trace replay, semantic match.

Every check opens its own solver session; nothing here reads engine frames.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Optional, Sequence

from .boost.assertions import QuantifiedAssertion
from .config import SolverConfig
from .engine.results import Trace
from .errors import UnassignedAtomError
from .grounding.evaluate import State, complete, evaluate, evaluate_pair
from .grounding.ground import Node
from .solver.queries import check_sat, implies
from .solver.session import SolverSession, open_session

if TYPE_CHECKING:
    from .grounding.instance import FiniteInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    """Outcome of `check_inductive`; a failure names the check and its witness."""

    passed: bool
    check: Optional[str] = None
    state: Optional[State] = None
    successor: Optional[State] = None


@dataclass(frozen=True)
class TraceCheck:
    valid: bool
    step: Optional[int] = None
    reason: str = ""


@contextmanager
def _session(
    instance: "FiniteInstance",
    config: Optional[SolverConfig],
    session: Optional[SolverSession],
) -> Iterator[SolverSession]:
    if session is not None:
        yield session
        return
    with open_session(instance, config or SolverConfig(), label="certify") as owned:
        yield owned


def invariant_node(instance: "FiniteInstance", prop: Node, assertions: Sequence[QuantifiedAssertion]) -> Node:
    b = instance.builder
    return b.conj([prop, *(instance.expand(item.formula()) for item in assertions)])


def check_inductive(
    instance: "FiniteInstance",
    prop: Node,
    assertions: Sequence[QuantifiedAssertion],
    *,
    config: Optional[SolverConfig] = None,
    session: Optional[SolverSession] = None,
) -> Certificate:
    """Initiation, consecution and safety of `prop ∧ assertions` at this instance."""

    b = instance.builder
    inv = invariant_node(instance, prop, assertions)
    with _session(instance, config, session) as active:
        first = check_sat(active, [instance.init, b.neg(inv)])
        if first.sat:
            logger.info("initiation fails in %s", instance.label)
            return Certificate(False, "initiation", first.state)
        step = check_sat(active, [inv, instance.transition.step, b.neg(b.prime(inv))])
        if step.sat:
            logger.info("consecution fails in %s", instance.label)
            return Certificate(False, "consecution", step.state, step.successor)
        safety = check_sat(active, [inv, b.neg(prop)])
        if safety.sat:
            return Certificate(False, "safety", safety.state)
    return Certificate(True)


def minimize(
    instance: "FiniteInstance",
    prop: Node,
    assertions: Sequence[QuantifiedAssertion],
    *,
    config: Optional[SolverConfig] = None,
    session: Optional[SolverSession] = None,
) -> list[QuantifiedAssertion]:
    """Drop assertions, newest first, that the rest implies while staying inductive."""

    kept = list(assertions)
    with _session(instance, config, session) as active:
        if not check_inductive(instance, prop, kept, session=active).passed:
            raise ValueError(f"cannot minimise a set that is not inductive at {instance.label}")
        for candidate in reversed(list(assertions)):
            rest = [item for item in kept if item is not candidate]
            if len(rest) == len(kept):
                continue
            if not implies(active, invariant_node(instance, prop, rest), instance.expand(candidate.formula())):
                continue
            if check_inductive(instance, prop, rest, session=active).passed:
                logger.info("dropping %s: implied by the remaining assertions", candidate.name)
                kept = rest
    return kept


def equivalent(
    instance: "FiniteInstance",
    left: Node,
    right: Node,
    *,
    config: Optional[SolverConfig] = None,
    session: Optional[SolverSession] = None,
) -> bool:
    """Mutual implication of two ground invariants."""

    with _session(instance, config, session) as active:
        return implies(active, left, right) and implies(active, right, left)


def check_trace(instance: "FiniteInstance", trace: Trace, prop: Optional[Node] = None) -> TraceCheck:
    """Replay `trace`: Init first, each labelled action in turn, a property violation last."""

    prop = instance.safety if prop is None else prop
    if not trace.steps:
        return TraceCheck(False, 0, "empty trace")
    states: list[State] = []
    for index, step in enumerate(trace.steps):
        try:
            states.append(complete(instance, step.state))
        except UnassignedAtomError as error:
            return TraceCheck(False, index, error.message)
    if not evaluate(instance.init, states[0]):
        return TraceCheck(False, 0, "first state is not initial")
    for index in range(1, len(states)):
        label = trace.steps[index].action
        action = instance.transition.find(label or "")
        if action is None:
            return TraceCheck(False, index, f"unknown action {label!r}")
        if not evaluate_pair(action.relation, states[index - 1], states[index]):
            return TraceCheck(False, index, f"{label} does not relate states {index - 1} and {index}")
    if evaluate(prop, states[-1]):
        return TraceCheck(False, len(states) - 1, "last state satisfies the property")
    return TraceCheck(True)


__all__ = [
    "Certificate",
    "TraceCheck",
    "check_inductive",
    "check_trace",
    "equivalent",
    "invariant_node",
    "minimize",
]
