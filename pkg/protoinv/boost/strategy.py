"""Boosting strategy applied to every learned clause: symmetry first, then ranges per ordered sort."""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import TYPE_CHECKING, Optional

from ..errors import ProtoinvError
from ..grounding.clauses import Clause
from ..ir import TRUE, conjoin
from .assertions import Boosted, QuantifiedAssertion, clause_formula, mentions_constants, with_pinned_names
from .ranges import Oracle, boost_range
from .symmetry import generators, group_order, infer_quantified, orbit

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance
    from ..solver.session import SolverSession

logger = logging.getLogger(__name__)


class BoostStrategy:
    """Turns one learned clause into assertions plus the ground clauses they cover.

    With both boosters off every clause is returned as a ground assertion of itself.
    """

    def __init__(
        self,
        instance: "FiniteInstance",
        *,
        symmetry: bool = True,
        ranges: bool = True,
        debug: bool = False,
    ) -> None:
        self.instance = instance
        self.symmetry = symmetry
        self.ranges = ranges
        self.debug = debug
        self.generators = generators(instance) if symmetry else []
        self.order = group_order(instance)
        self.ordered_sorts = [sort.name for sort in instance.protocol.sorts if sort.is_ordered]

    def _raw_ground(self, clauses: frozenset[Clause]) -> QuantifiedAssertion:
        ordered = sorted(clauses, key=lambda item: item.literals)
        matrix = conjoin([clause_formula(self.instance, item) for item in ordered])
        return QuantifiedAssertion("", (), TRUE, matrix, ground=True)

    def symmetric(self, clause: Clause, session: Optional["SolverSession"] = None) -> Boosted:
        clauses: Optional[frozenset[Clause]] = None
        if self.symmetry:
            clauses = orbit(self.instance, clause, self.generators)
        if clauses is None:
            return Boosted(self._raw_ground(frozenset({clause})), frozenset({clause}), clause)
        if self.debug and self.order % len(clauses):
            raise ProtoinvError(
                f"orbit of {clause.render(self.instance)} has {len(clauses)} clauses, "
                f"which does not divide the group order {self.order}"
            )
        assertion = infer_quantified(self.instance, clause, clauses, session=session)
        return Boosted(assertion or self._raw_ground(clauses), clauses, clause)

    def finish(self, boosted: Boosted) -> Boosted:
        assertion = boosted.assertion
        antecedent = with_pinned_names(self.instance, assertion.antecedent)
        matrix = with_pinned_names(self.instance, assertion.matrix)
        ground = mentions_constants(antecedent) or mentions_constants(matrix)
        return replace(boosted, assertion=replace(assertion, antecedent=antecedent, matrix=matrix, ground=ground))

    def boost(
        self,
        clause: Clause,
        oracle: Oracle,
        *,
        session: Optional["SolverSession"] = None,
    ) -> list[Boosted]:
        """Pieces covering `clause`; `oracle` judges candidate variant sets against the frame."""

        pieces = [self.symmetric(clause, session)]
        if self.ranges:
            for sort in self.ordered_sorts:
                pieces = [item for piece in pieces for item in boost_range(self.instance, piece, sort, oracle, session=session)]
        finished = [self.finish(piece) for piece in pieces]
        logger.debug(
            "boosted %s into %d assertion(s) over %d clause(s)",
            clause.render(self.instance),
            len(finished),
            sum(len(piece.clauses) for piece in finished),
        )
        return finished


__all__ = ["BoostStrategy"]
