"""Query services built on a session: satisfiability, 1-step reachability, cube shrinking, validity."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import SolverError
from ..grounding.evaluate import State, complete, evaluate, evaluate_pair, init_state
from ..grounding.ground import Node, atom_keys, is_primed
from .session import SolverSession, Status

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QueryResult:
    """Outcome of one query; sat carries the completed model, unsat the core."""

    status: Status
    state: Optional[State] = None
    successor: Optional[State] = None
    core: tuple[Node, ...] = ()

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT


@dataclass(frozen=True)
class StepContext:
    """Assumption handles selecting a source frame and the transition relation."""

    frame: tuple[str, ...]
    transition: str


def _model(session: SolverSession, *, with_successor: bool) -> tuple[State, Optional[State]]:
    instance = session.instance
    state = complete(instance, session.state_values())
    successor = complete(instance, session.state_values(next_state=True)) if with_successor else None
    return state, successor


def check_sat(
    session: SolverSession,
    assertions: Sequence[Node],
    assumptions: Sequence[Node] = (),
    *,
    debug: bool = False,
) -> QueryResult:
    """Satisfiability of `assertions` plus `assumptions`; the core is drawn from the assumptions."""

    b = session.instance.builder
    primed_atoms = any(is_primed(key) for node in (*assertions, *assumptions) for key in atom_keys(node))
    session.push()
    try:
        for node in assertions:
            session.add(node)
        handles = [session.literal(node) for node in assumptions]
        result = session.check(handles, kind="check_sat", want_core=True)
        if result.unsat:
            chosen = set(result.core)
            return QueryResult(Status.UNSAT, core=tuple(node for node, handle in zip(assumptions, handles) if handle in chosen))
        state, successor = _model(session, with_successor=primed_atoms)
    finally:
        session.pop()
    if debug:
        formula = b.conj((*assertions, *assumptions))
        holds = evaluate_pair(formula, state, successor or {}) if primed_atoms else evaluate(formula, state)
        if not holds:
            raise SolverError("solver model does not satisfy the query", code="solver_protocol")
    return QueryResult(Status.SAT, state, successor)


def one_step_query(
    session: SolverSession,
    context: StepContext,
    cube: Sequence[Node],
    *,
    debug: bool = False,
) -> QueryResult:
    """Whether some state of the source frame steps into `cube`.

    `cube` holds current-frame literals; they are primed here. Unsat cores
    are reported in terms of the unprimed literals.
    """

    b = session.instance.builder
    handles = [session.literal(b.prime(node)) for node in cube]
    result = session.check([*context.frame, context.transition, *handles], kind="one_step", want_core=True)
    if result.unsat:
        chosen = set(result.core)
        return QueryResult(Status.UNSAT, core=tuple(node for node, handle in zip(cube, handles) if handle in chosen))
    state, successor = _model(session, with_successor=True)
    if debug and not all(evaluate(node, successor or {}) for node in cube):
        raise SolverError("predecessor model does not reach the cube", code="solver_protocol")
    return QueryResult(Status.SAT, state, successor)


class InitCheck:
    """Decides whether a cube contains an initial state.

    A protocol whose Init fixes a single state is answered by evaluation;
    otherwise the session is asked under the `init` handle.
    """

    def __init__(self, session: SolverSession, init_handle: str) -> None:
        self.session = session
        self.handle = init_handle
        self.state = init_state(session.instance)

    def intersects(self, cube: Sequence[Node]) -> bool:
        if self.state is not None:
            return all(evaluate(node, self.state) for node in cube)
        handles = [self.session.literal(node) for node in cube]
        return self.session.check([self.handle, *handles], kind="init").sat


def shrink_cube(
    session: SolverSession,
    context: StepContext,
    cube: Sequence[Node],
    init: InitCheck,
) -> list[Node]:
    """A sub-cube still unreachable in one step and still disjoint from Init.

    The unsat core is taken first, then single literals are dropped in the
    given order; the result is never larger than `cube`.
    """

    first = one_step_query(session, context, cube)
    if not first.unsat:
        raise SolverError("shrink_cube needs a cube unreachable in one step", code="solver_protocol")
    if init.intersects(cube):
        raise SolverError("shrink_cube needs a cube disjoint from Init", code="solver_protocol")
    kept = [node for node in cube if node in set(first.core)]
    if init.intersects(kept):
        for node in cube:
            if node in kept:
                continue
            kept = [item for item in cube if item in set(kept) or item is node]
            if not init.intersects(kept):
                break
        if init.intersects(kept):
            kept = list(cube)
    index = 0
    while index < len(kept) and len(kept) > 1:
        trial = kept[:index] + kept[index + 1:]
        if not init.intersects(trial):
            answer = one_step_query(session, context, trial)
            if answer.unsat:
                core = set(answer.core)
                reduced = [node for node in trial if node in core]
                kept = reduced if reduced and not init.intersects(reduced) else trial
                continue
        index += 1
    logger.debug("shrank cube from %d to %d literals", len(cube), len(kept))
    return kept


def implies(session: SolverSession, left: Node, right: Node) -> bool:
    """Whether `left` entails `right` under the session's background constraints."""

    b = session.instance.builder
    return check_sat(session, [left, b.neg(right)]).unsat


__all__ = ["InitCheck", "QueryResult", "StepContext", "check_sat", "implies", "one_step_query", "shrink_cube"]
