"""Incremental induction over a finite instance, with boosting of every learned clause."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

from ..boost.assertions import QuantifiedAssertion
from ..boost.ranges import Verdict
from ..boost.strategy import BoostStrategy
from ..config import EngineConfig, RunConfig
from ..errors import BudgetExceeded, ProtoinvError, SolverProtocolError, SolverTimeoutError
from ..grounding.clauses import Clause, Cube, literal_of_node
from ..grounding.evaluate import State, complete, evaluate, fired_actions
from ..grounding.ground import Node
from ..resources import Budget, peak_memory_mb
from ..solver.queries import InitCheck, one_step_query, shrink_cube
from ..solver.session import open_session
from .frames import Frames, Lemma
from .results import Inconclusive, Outcome, Proof, Trace, TraceStep

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance
    from ..solver.session import SolverSession

logger = logging.getLogger(__name__)


@dataclass(order=True)
class Obligation:
    """A state (as a full cube) that must be excluded from `frame`."""

    frame: int
    seq: int
    cube: Cube = field(compare=False)
    state: State = field(compare=False)
    parent: Optional["Obligation"] = field(default=None, compare=False)
    bad: Optional[State] = field(default=None, compare=False)

    @property
    def depth(self) -> int:
        return 0 if self.parent is None else self.parent.depth + 1


def property_node(instance: "FiniteInstance", strengthening: Sequence[QuantifiedAssertion] = ()) -> Node:
    b = instance.builder
    return b.conj([instance.safety, *(instance.expand(item.formula()) for item in strengthening)])


class Ic3Engine:
    def __init__(
        self,
        instance: "FiniteInstance",
        session: "SolverSession",
        config: EngineConfig | None = None,
        *,
        strengthening: Sequence[QuantifiedAssertion] = (),
        prop: Optional[Node] = None,
        budget: Optional[Budget] = None,
    ) -> None:
        self.instance = instance
        self.session = session
        self.config = config or EngineConfig()
        self.builder = instance.builder
        self.strengthening = tuple(strengthening)
        self.prop = prop if prop is not None else property_node(instance, strengthening)
        self.budget = budget or Budget(self.config)
        self.frames = Frames(session, self.prop, subsume=self.config.subsume)
        self.init_check = InitCheck(session, self.frames.init)
        self.strategy = BoostStrategy(
            instance,
            symmetry=self.config.symmetry,
            ranges=self.config.range,
            debug=self.config.debug_checks,
        )
        self.obligations = 0
        self.learned = 0
        self._seq = 0

    # Driver

    def prove(self) -> Outcome:
        try:
            return self._run()
        except BudgetExceeded as error:
            logger.warning("giving up on %s: %s", self.instance.label, error.message)
            return Inconclusive(self.instance.label, error.message, error.resource, self.frames.top, self.statistics())
        except SolverTimeoutError as error:
            logger.warning("giving up on %s: %s", self.instance.label, error.message)
            return Inconclusive(self.instance.label, error.message, "solver", self.frames.top, self.statistics())

    def _run(self) -> Outcome:
        b = self.builder
        session = self.session
        bad = b.neg(self.prop)
        first = session.check([self.frames.init, session.literal(bad)], kind="init_bad")
        if first.sat:
            state = complete(self.instance, session.state_values())
            return self._trace_of([TraceStep(state)])
        step = one_step_query(session, self.frames.context(0), [bad])
        if step.sat:
            assert step.state is not None and step.successor is not None
            return self._trace_of(self._steps([step.state, step.successor]))
        self.frames.new_frame()
        while True:
            self.budget.check(frames=self.frames.top, obligations=self.obligations)
            trace = self._strengthen(self.frames.top)
            if trace is not None:
                return trace
            self.frames.new_frame()
            closed = self.propagate()
            logger.info(
                "frame %d: deltas %s, %d lemmas learned, %d queries",
                self.frames.top,
                self.frames.counts(),
                self.learned,
                session.stats.queries,
            )
            if self.config.debug_checks:
                self.audit()
            if closed is not None:
                return self._proof(closed)

    # Blocking

    def _obligation(self, frame: int, state: State, *, parent: Optional[Obligation] = None, bad: Optional[State] = None) -> Obligation:
        self._seq += 1
        cube = Cube.from_state(self.instance, state)
        return Obligation(frame, self._seq, cube, state, parent, bad)

    def _again(self, ob: Obligation, frame: int) -> Obligation:
        self._seq += 1
        return Obligation(frame, self._seq, ob.cube, ob.state, ob.parent, ob.bad)

    def _strengthen(self, top: int) -> Optional[Trace]:
        bad = self.builder.neg(self.prop)
        while True:
            result = one_step_query(self.session, self.frames.context(top), [bad], debug=self.config.debug_checks)
            if result.unsat:
                return None
            assert result.state is not None
            root = self._obligation(top, result.state, bad=result.successor)
            trace = self.block(root)
            if trace is not None:
                return trace

    def blocked(self, ob: Obligation) -> bool:
        session = self.session
        handles = [session.literal(node) for node in ob.cube.nodes(self.builder)]
        return session.check([*self.frames.assumptions(ob.frame), *handles], kind="blocked").unsat

    def block(self, root: Obligation) -> Optional[Trace]:
        """Discharge `root` and everything it spawns; a Trace when some obligation reaches Init."""

        queue = [root]
        top = self.frames.top
        while queue:
            ob = heapq.heappop(queue)
            self.obligations += 1
            self.budget.check(frames=top, obligations=self.obligations)
            if ob.frame == 0 or self.init_check.intersects(ob.cube.nodes(self.builder)):
                return self._trace(ob)
            if self.blocked(ob):
                if ob.frame < top:
                    heapq.heappush(queue, self._again(ob, ob.frame + 1))
                continue
            result = one_step_query(
                self.session,
                self.frames.context(ob.frame - 1),
                ob.cube.nodes(self.builder),
                debug=self.config.debug_checks,
            )
            if result.sat:
                assert result.state is not None
                child = self._obligation(ob.frame - 1, result.state, parent=ob)
                if child.frame == 0:
                    return self._trace(child)
                heapq.heappush(queue, child)
                heapq.heappush(queue, ob)
                continue
            level = self.learn(ob)
            if level < top:
                heapq.heappush(queue, self._again(ob, level + 1))
        return None

    def learn(self, ob: Obligation) -> int:
        """Generalise and boost the clause excluding `ob`; returns the level it was added at."""

        b = self.builder
        session = self.session
        kept = shrink_cube(session, self.frames.context(ob.frame - 1), ob.cube.nodes(b), self.init_check)
        clause = Cube.of(literal_of_node(self.instance, node) for node in kept).negate()
        level = ob.frame
        if self.config.push_forward:
            while level < self.frames.top and one_step_query(session, self.frames.context(level), kept).unsat:
                level += 1
        pieces = self.strategy.boost(clause, self._oracle(level), session=session)
        for piece in pieces:
            if self.frames.add(piece, level) is not None:
                self.learned += 1
        logger.debug("learned %s at level %d (%d piece(s))", clause.render(self.instance), level, len(pieces))
        return level

    def _oracle(self, level: int):
        b = self.builder
        session = self.session
        frames = self.frames

        def judge(clauses: frozenset[Clause]) -> Verdict:
            if any(self.init_check.intersects(clause.negate().nodes(b)) for clause in clauses):
                return Verdict.UNSAFE
            node = b.conj(clause.node(b) for clause in clauses)
            try:
                result = session.check(
                    [*frames.assumptions(level - 1), frames.transition, session.literal(b.neg(b.prime(node)))],
                    kind="variant",
                )
            except SolverTimeoutError:
                return Verdict.UNKNOWN
            return Verdict.SAFE if result.unsat else Verdict.UNSAFE

        return judge

    # Propagation

    def _inductive(self, index: int, node: Node) -> bool:
        session = self.session
        b = self.builder
        handles = [*self.frames.assumptions(index), self.frames.transition, session.literal(b.neg(b.prime(node)))]
        try:
            return session.check(handles, kind="propagate").unsat
        except SolverTimeoutError:
            return False

    def propagate(self) -> Optional[int]:
        """Push lemmas forward; the first level whose delta empties, if any."""

        for index in range(1, self.frames.top):
            for lemma in self.frames.delta(index):
                if self._inductive(index, lemma.node):
                    self.frames.promote(lemma, index + 1)
            if not self.frames.delta(index):
                return index
        return None

    # Results

    def extract_assertions(self, closed: int) -> list[Lemma]:
        return self.frames.at_least(closed + 1)

    def _proof(self, closed: int) -> Proof:
        lemmas = self.extract_assertions(closed)
        assertions = tuple(lemma.assertion.renamed(f"L{position}") for position, lemma in enumerate(lemmas, start=1))
        logger.info(
            "proved %s at frame %d with %d assertions over %d ground clauses",
            self.instance.label,
            closed,
            len(assertions),
            self.frames.ground_count(lemmas),
        )
        return Proof(
            self.instance.label,
            assertions,
            tuple(lemma.clauses for lemma in lemmas),
            closed,
            self.statistics(),
        )

    def _steps(self, states: list[State]) -> list[TraceStep]:
        steps = [TraceStep(states[0])]
        for current, following in zip(states, states[1:]):
            labels = fired_actions(self.instance, current, following)
            if not labels:
                raise SolverProtocolError("counterexample step matches no action instance")
            steps.append(TraceStep(following, labels[0]))
        return steps

    def _trace(self, ob: Obligation) -> Trace:
        states: list[State] = []
        cursor: Optional[Obligation] = ob
        last: Optional[Obligation] = None
        while cursor is not None:
            states.append(cursor.state)
            last = cursor
            cursor = cursor.parent
        assert last is not None and last.bad is not None
        states.append(complete(self.instance, last.bad))
        return self._trace_of(self._steps(states))

    def _trace_of(self, steps: list[TraceStep]) -> Trace:
        if not evaluate(self.instance.init, steps[0].state) or evaluate(self.prop, steps[-1].state):
            raise SolverProtocolError("counterexample does not replay")
        logger.info("counterexample of length %d in %s", len(steps), self.instance.label)
        return Trace(self.instance.label, tuple(steps), self.statistics())

    def audit(self) -> None:
        """Every lemma of level i must be unreachable from frame i-1 in one step."""

        for lemma in self.frames.ordered():
            if not self._inductive(lemma.level - 1, lemma.node):
                raise ProtoinvError(f"frame audit failed for lemma {lemma.uid} at level {lemma.level}")

    def statistics(self) -> dict[str, object]:
        stats = self.session.stats
        lemmas = self.frames.ordered()
        return {
            "frames": self.frames.top,
            "lemmas": len(lemmas),
            "ground_clauses": self.frames.ground_count(lemmas),
            "learned": self.learned,
            "suppressed": self.frames.suppressed,
            "obligations": self.obligations,
            "queries": stats.queries,
            "solver_seconds": round(stats.seconds, 3),
            "seconds": round(self.budget.elapsed, 3),
            "peak_memory_mb": round(peak_memory_mb(), 1),
            "query_kinds": dict(stats.kinds),
        }


def prove(
    instance: "FiniteInstance",
    config: RunConfig | None = None,
    *,
    strengthening: Sequence[QuantifiedAssertion] = (),
    prop: Optional[Node] = None,
    session: Optional["SolverSession"] = None,
) -> Outcome:
    """Prove the instance's Safety (plus `strengthening`), or find a counterexample."""

    config = config or RunConfig()
    if session is not None:
        return Ic3Engine(instance, session, config.engine, strengthening=strengthening, prop=prop).prove()
    with open_session(instance, config.solver, label="ic3") as owned:
        return Ic3Engine(instance, owned, config.engine, strengthening=strengthening, prop=prop).prove()


__all__ = ["Ic3Engine", "Obligation", "prove", "property_node"]
