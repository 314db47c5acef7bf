"""Ground transition relation: one disjunct per enabled action instance."""

from __future__ import annotations

import logging
import operator
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..ir import Action, DomainConst, Eq, PointUpdate, Symbol, UpdateKind
from .expand import EnumAtom, Expander
from .ground import Node, atom_key, primed

if TYPE_CHECKING:
    from .instance import FiniteInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActionInstance:
    label: str
    action: str
    args: tuple[DomainConst, ...]
    guard: Node
    relation: Node


@dataclass
class Transition:
    """Disjunction of action instances over current and primed atoms.

    `relation` excludes the definition biconditionals; `step` includes them
    for both frames.
    """

    disjuncts: tuple[ActionInstance, ...]
    raw_count: int
    relation: Node
    step: Node
    unchanged: dict[str, Node] = field(default_factory=dict)

    def per_action(self) -> dict[str, int]:
        return dict(Counter(item.action for item in self.disjuncts))

    def find(self, label: str) -> ActionInstance | None:
        for item in self.disjuncts:
            if item.label == label:
                return item
        return None


class _ActionGrounder:
    def __init__(self, instance: "FiniteInstance") -> None:
        self.instance = instance
        self.builder = instance.builder
        self.current = Expander(instance)
        self.unchanged: dict[str, Node] = {}

    def _frame(self, key: str, sort: str | None) -> Node:
        b = self.builder
        if sort is None:
            return b.iff(b.atom(primed(key)), b.atom(key))
        return b.eqv(primed(key), key)

    def keep(self, symbol: Symbol) -> Node:
        """Frame condition for a whole symbol, shared across actions by name."""

        node = self.unchanged.get(symbol.name)
        if node is None:
            b = self.builder
            sort = None if symbol.is_relation else symbol.result
            body = b.conj(
                self._frame(atom_key(symbol.name, args), sort) for args in self.instance.tuples(symbol.arg_sorts)
            )
            node = b.ref(f"unchanged_{symbol.name}", body)
            self.unchanged[symbol.name] = node
        return node

    def _matches(self, point: PointUpdate, args: tuple[DomainConst, ...], env) -> Node:
        b = self.builder
        return b.conj(self.current.formula(Eq(term, const), env) for term, const in zip(point.args, args))

    def _assign(self, symbol: Symbol, key: str, point: PointUpdate, env) -> Node:
        b = self.builder
        if symbol.is_relation:
            return b.iff(b.atom(primed(key)), self.current.formula(point.value, env))
        target = EnumAtom(primed(key), symbol.result)
        return b.disj(
            b.conj((guard, self.current.compare(target, value, operator.eq)))
            for guard, value in self.current.values(point.value, env)
        )

    def pointwise(self, symbol: Symbol, points: tuple[PointUpdate, ...], env) -> Node:
        b = self.builder
        sort = None if symbol.is_relation else symbol.result
        parts = []
        for args in self.instance.tuples(symbol.arg_sorts):
            key = atom_key(symbol.name, args)
            node = self._frame(key, sort)
            for point in points:
                node = b.ite(self._matches(point, args, env), self._assign(symbol, key, point, env), node)
            parts.append(node)
        return b.conj(parts)

    def ground(self, action: Action) -> tuple[list[ActionInstance], int]:
        b = self.builder
        protocol = self.instance.protocol
        found: list[ActionInstance] = []
        raw = 0
        for args in self.instance.tuples(tuple(var.sort for var in action.params)):
            raw += 1
            env = dict(zip(action.params, args))
            guard = self.current.formula(action.guard, env)
            if guard is b.false:
                continue
            parts = [guard]
            for symbol in protocol.state_symbols:
                update = action.update_for(symbol.name)
                if update is None or update.kind is UpdateKind.UNCHANGED:
                    parts.append(self.keep(symbol))
                else:
                    parts.append(self.pointwise(symbol, update.points, env))
            relation = b.conj(parts)
            if relation is b.false:
                continue
            label = f"{action.name}({','.join(item.name for item in args)})" if args else action.name
            found.append(ActionInstance(label, action.name, args, guard, relation))
        return found, raw


def ground_transition(instance: "FiniteInstance") -> Transition:
    """Ground every action of the protocol; instances with a false guard are dropped."""

    b = instance.builder
    grounder = _ActionGrounder(instance)
    disjuncts: list[ActionInstance] = []
    raw = 0
    for action in instance.protocol.actions:
        found, count = grounder.ground(action)
        disjuncts.extend(found)
        raw += count
    relation = b.disj(item.relation for item in disjuncts)
    step = b.conj((instance.definitions_current, instance.definitions_next, relation))
    logger.debug("grounded %s: %d of %d action tuples enabled", instance.label, len(disjuncts), raw)
    return Transition(tuple(disjuncts), raw, relation, step, dict(grounder.unchanged))


__all__ = ["ActionInstance", "Transition", "ground_transition"]
