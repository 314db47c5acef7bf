"""Ground literals, cubes and clauses over state and auxiliary atoms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Mapping

from .ground import GroundBuilder, Node, Op

if TYPE_CHECKING:
    from .instance import FiniteInstance


@dataclass(frozen=True, order=True)
class Literal:
    """`key = value` (or its negation); boolean atoms use True/False values and stay positive."""

    position: int
    key: str
    value: bool | int
    positive: bool = True

    def negate(self) -> "Literal":
        if isinstance(self.value, bool):
            return Literal(self.position, self.key, not self.value)
        return Literal(self.position, self.key, self.value, not self.positive)

    def node(self, builder: GroundBuilder) -> Node:
        if isinstance(self.value, bool):
            atom = builder.atom(self.key)
            return atom if self.value else builder.neg(atom)
        eq = builder.eq(self.key, self.value)
        return eq if self.positive else builder.neg(eq)

    def holds(self, state: Mapping[str, bool | int]) -> bool:
        value = state[self.key]
        if isinstance(self.value, bool):
            return bool(value) == self.value
        return (value == self.value) == self.positive

    def render(self, instance: "FiniteInstance") -> str:
        if isinstance(self.value, bool):
            return self.key if self.value else f"!{self.key}"
        info = instance.atom(self.key)
        name = instance.domain(info.sort or "").constants[self.value].name
        return f"{self.key}{'=' if self.positive else '!='}{name}"


def literal_for(instance: "FiniteInstance", key: str, value: bool | int, positive: bool = True) -> Literal:
    info = instance.atom(key)
    if info.is_boolean:
        value = bool(value) if positive else not bool(value)
        return Literal(info.position, key, value)
    return Literal(info.position, key, int(value), positive)


@dataclass(frozen=True)
class Cube:
    """A conjunction of literals in atom-table order."""

    literals: tuple[Literal, ...]

    @classmethod
    def of(cls, literals: Iterable[Literal]) -> "Cube":
        return cls(tuple(sorted(set(literals))))

    @classmethod
    def from_state(cls, instance: "FiniteInstance", state: Mapping[str, bool | int], *, aux: bool = True) -> "Cube":
        atoms = instance.atoms if aux else instance.state_atoms
        return cls.of(literal_for(instance, info.key, state[info.key]) for info in atoms if info.key in state)

    def __len__(self) -> int:
        return len(self.literals)

    def nodes(self, builder: GroundBuilder) -> list[Node]:
        return [item.node(builder) for item in self.literals]

    def node(self, builder: GroundBuilder) -> Node:
        return builder.conj(self.nodes(builder))

    def negate(self) -> "Clause":
        return Clause.of(item.negate() for item in self.literals)

    def holds(self, state: Mapping[str, bool | int]) -> bool:
        return all(item.holds(state) for item in self.literals)

    def render(self, instance: "FiniteInstance") -> str:
        return " & ".join(item.render(instance) for item in self.literals)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals in atom-table order."""

    literals: tuple[Literal, ...]

    @classmethod
    def of(cls, literals: Iterable[Literal]) -> "Clause":
        return cls(tuple(sorted(set(literals))))

    def __len__(self) -> int:
        return len(self.literals)

    @cached_property
    def _set(self) -> frozenset[Literal]:
        return frozenset(self.literals)

    def node(self, builder: GroundBuilder) -> Node:
        return builder.disj(item.node(builder) for item in self.literals)

    def negate(self) -> Cube:
        return Cube.of(item.negate() for item in self.literals)

    def subsumes(self, other: "Clause") -> bool:
        return self._set <= other._set

    def holds(self, state: Mapping[str, bool | int]) -> bool:
        return any(item.holds(state) for item in self.literals)

    def keys(self) -> set[str]:
        return {item.key for item in self.literals}

    def render(self, instance: "FiniteInstance") -> str:
        return " | ".join(item.render(instance) for item in self.literals)


def literal_of_node(instance: "FiniteInstance", node: Node) -> Literal:
    """The literal a cube node was built from (ATOM, EQ or their negations)."""

    positive = True
    if node.op is Op.NOT:
        node = node.children[0]
        positive = False
    if node.op is Op.ATOM:
        return literal_for(instance, node.key or "", positive)
    if node.op is Op.EQ:
        return literal_for(instance, node.key or "", int(node.value or 0), positive)
    raise ValueError(f"{node!r} is not a literal")


__all__ = ["Clause", "Cube", "Literal", "literal_for", "literal_of_node"]
