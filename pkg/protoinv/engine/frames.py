"""Frames in delta form, backed by activation handles in one solver session.

A lemma lives in the delta of its level; frame i (i >= 1) is the property
plus every lemma whose level is at least i. Frame 0 is Init.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional

from ..boost.assertions import Boosted, QuantifiedAssertion
from ..grounding.clauses import Clause
from ..grounding.ground import Node
from ..solver.queries import StepContext

if TYPE_CHECKING:
    from ..solver.session import SolverSession

logger = logging.getLogger(__name__)

INIT = "act.init"
TRANSITION = "act.T"
PROPERTY = "act.P"


@dataclass
class Lemma:
    uid: int
    assertion: QuantifiedAssertion
    clauses: frozenset[Clause]
    level: int
    node: Node
    handle: str


class Frames:
    def __init__(self, session: "SolverSession", property_node: Node, *, subsume: bool = True) -> None:
        instance = session.instance
        self.session = session
        self.builder = instance.builder
        self.subsume = subsume
        self.top = 0
        self.lemmas: dict[int, Lemma] = {}
        self._next = 0
        self.suppressed = 0
        self.init = session.activation(INIT)
        session.add(instance.init, guard=self.init)
        self.transition = session.activation(TRANSITION)
        session.add(instance.transition.step, guard=self.transition)
        self.property = session.activation(PROPERTY)
        session.add(property_node, guard=self.property)

    def new_frame(self) -> int:
        self.top += 1
        return self.top

    def assumptions(self, index: int) -> tuple[str, ...]:
        if index == 0:
            return (self.init,)
        return (self.property, *(lemma.handle for lemma in self.ordered() if lemma.level >= index))

    def context(self, index: int) -> StepContext:
        return StepContext(self.assumptions(index), self.transition)

    def ordered(self) -> list[Lemma]:
        return sorted(self.lemmas.values(), key=lambda lemma: lemma.uid)

    def delta(self, index: int) -> list[Lemma]:
        return [lemma for lemma in self.ordered() if lemma.level == index]

    def at_least(self, index: int) -> list[Lemma]:
        return [lemma for lemma in self.ordered() if lemma.level >= index]

    def clauses(self, index: int) -> set[Clause]:
        found: set[Clause] = set()
        for lemma in self.at_least(index):
            found.update(lemma.clauses)
        return found

    def subsumed(self, clause: Clause, index: int) -> bool:
        return any(existing.subsumes(clause) for lemma in self.at_least(index) for existing in lemma.clauses)

    def add(self, boosted: Boosted, level: int) -> Optional[Lemma]:
        """Insert `boosted` at `level`; None when the frame already implies all its clauses."""

        if self.subsume and all(self.subsumed(clause, level) for clause in boosted.clauses):
            self.suppressed += 1
            return None
        self._next += 1
        b = self.builder
        node = b.conj(clause.node(b) for clause in sorted(boosted.clauses, key=lambda item: item.literals))
        handle = self.session.activation(f"lemma.{self._next}")
        self.session.add(node, guard=handle)
        lemma = Lemma(self._next, boosted.assertion, boosted.clauses, level, node, handle)
        if self.subsume:
            for other in [item for item in self.ordered() if item.level <= level]:
                if all(any(mine.subsumes(theirs) for mine in lemma.clauses) for theirs in other.clauses):
                    self.remove(other)
        self.lemmas[lemma.uid] = lemma
        return lemma

    def remove(self, lemma: Lemma) -> None:
        self.session.retire(lemma.handle)
        self.lemmas.pop(lemma.uid, None)
        logger.debug("retired lemma %d at level %d", lemma.uid, lemma.level)

    def promote(self, lemma: Lemma, level: int) -> None:
        lemma.level = level

    def counts(self) -> list[int]:
        return [len(self.delta(index)) for index in range(1, self.top + 1)]

    def ground_count(self, lemmas: Iterable[Lemma]) -> int:
        return sum(len(lemma.clauses) for lemma in lemmas)


__all__ = ["INIT", "PROPERTY", "TRANSITION", "Frames", "Lemma"]
