"""Hash-consed quantifier-free formulas over ground atoms.

Every node is interned in a `GroundBuilder`, so structurally equal nodes are the
same object and carry a stable integer `uid`. Connectives fold constants and
flatten nested conjunctions/disjunctions on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator

PRIME = "'"


class Op(str, Enum):
    CONST = "const"
    ATOM = "atom"
    EQ = "eq"
    EQV = "eqv"
    NOT = "not"
    AND = "and"
    OR = "or"
    IFF = "iff"
    REF = "ref"


@dataclass(eq=False, slots=True)
class Node:
    """One interned node.

    ATOM uses `key`; EQ compares enumerated atom `key` with element `value`;
    EQV compares enumerated atoms `key` and `other`; REF names a shared macro
    whose body is `children[0]`.
    """

    uid: int
    op: Op
    children: tuple["Node", ...] = ()
    key: str | None = None
    value: bool | int | None = None
    other: str | None = None
    name: str | None = None

    def __repr__(self) -> str:
        return f"Node#{self.uid}({self.op.value})"

    def __lt__(self, other: "Node") -> bool:
        return self.uid < other.uid


def atom_key(symbol: str, args: tuple) -> str:
    """`votes(a1,b1,v1)` style key; nullary symbols keep their bare name."""

    if not args:
        return symbol
    return f"{symbol}({','.join(item.name for item in args)})"


def primed(key: str) -> str:
    return key + PRIME


def unprimed(key: str) -> str:
    return key[:-1] if key.endswith(PRIME) else key


def is_primed(key: str) -> bool:
    return key.endswith(PRIME)


@dataclass(eq=False)
class GroundBuilder:
    """Interning factory for ground nodes."""

    _table: dict[tuple, Node] = field(default_factory=dict)
    macros: dict[str, Node] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.true = self._intern((Op.CONST, True), lambda uid: Node(uid, Op.CONST, value=True))
        self.false = self._intern((Op.CONST, False), lambda uid: Node(uid, Op.CONST, value=False))

    def __len__(self) -> int:
        return len(self._table)

    def _intern(self, signature: tuple, make: Callable[[int], Node]) -> Node:
        node = self._table.get(signature)
        if node is None:
            node = make(len(self._table))
            self._table[signature] = node
        return node

    def const(self, value: bool) -> Node:
        return self.true if value else self.false

    def atom(self, key: str) -> Node:
        return self._intern((Op.ATOM, key), lambda uid: Node(uid, Op.ATOM, key=key))

    def eq(self, key: str, index: int) -> Node:
        return self._intern((Op.EQ, key, index), lambda uid: Node(uid, Op.EQ, key=key, value=index))

    def eqv(self, left: str, right: str) -> Node:
        if left == right:
            return self.true
        left, right = sorted((left, right))
        return self._intern((Op.EQV, left, right), lambda uid: Node(uid, Op.EQV, key=left, other=right))

    def neg(self, node: Node) -> Node:
        if node.op is Op.CONST:
            return self.const(not node.value)
        if node.op is Op.NOT:
            return node.children[0]
        return self._intern((Op.NOT, node.uid), lambda uid: Node(uid, Op.NOT, (node,)))

    def _flatten(self, op: Op, items: Iterable[Node]) -> list[Node] | Node:
        unit, zero = (self.true, self.false) if op is Op.AND else (self.false, self.true)
        seen: dict[int, Node] = {}
        stack = list(items)
        stack.reverse()
        while stack:
            item = stack.pop()
            if item is unit:
                continue
            if item is zero:
                return zero
            if item.op is op:
                stack.extend(reversed(item.children))
                continue
            seen.setdefault(item.uid, item)
        for item in seen.values():
            if item.op is Op.NOT and item.children[0].uid in seen:
                return zero
        return sorted(seen.values())

    def conj(self, items: Iterable[Node]) -> Node:
        return self._connective(Op.AND, items)

    def disj(self, items: Iterable[Node]) -> Node:
        return self._connective(Op.OR, items)

    def _connective(self, op: Op, items: Iterable[Node]) -> Node:
        parts = self._flatten(op, items)
        if isinstance(parts, Node):
            return parts
        if not parts:
            return self.true if op is Op.AND else self.false
        if len(parts) == 1:
            return parts[0]
        children = tuple(parts)
        return self._intern((op, *(item.uid for item in children)), lambda uid: Node(uid, op, children))

    def implies(self, left: Node, right: Node) -> Node:
        return self.disj((self.neg(left), right))

    def iff(self, left: Node, right: Node) -> Node:
        if left is right:
            return self.true
        if left.op is Op.CONST:
            return right if left.value else self.neg(right)
        if right.op is Op.CONST:
            return left if right.value else self.neg(left)
        if self.neg(left) is right:
            return self.false
        left, right = sorted((left, right))
        return self._intern((Op.IFF, left.uid, right.uid), lambda uid: Node(uid, Op.IFF, (left, right)))

    def ite(self, condition: Node, then: Node, otherwise: Node) -> Node:
        if condition.op is Op.CONST:
            return then if condition.value else otherwise
        if then is otherwise:
            return then
        return self.disj((self.conj((condition, then)), self.conj((self.neg(condition), otherwise))))

    def ref(self, name: str, body: Node) -> Node:
        """A named macro; backends declare it once and refer to it by name."""

        if body.op is Op.CONST:
            return body
        known = self.macros.get(name)
        if known is not None and known is not body:
            raise ValueError(f"macro {name} already defined with a different body")
        self.macros[name] = body
        return self._intern((Op.REF, name), lambda uid: Node(uid, Op.REF, (body,), name=name))

    def rename(self, node: Node, rename_key: Callable[[str], str]) -> Node:
        """Rebuild `node` with every atom key passed through `rename_key`; macros are inlined."""

        memo: dict[int, Node] = {}

        def go(item: Node) -> Node:
            done = memo.get(item.uid)
            if done is not None:
                return done
            if item.op is Op.CONST:
                result = item
            elif item.op is Op.ATOM:
                result = self.atom(rename_key(item.key or ""))
            elif item.op is Op.EQ:
                result = self.eq(rename_key(item.key or ""), int(item.value or 0))
            elif item.op is Op.EQV:
                result = self.eqv(rename_key(item.key or ""), rename_key(item.other or ""))
            elif item.op is Op.NOT:
                result = self.neg(go(item.children[0]))
            elif item.op is Op.AND:
                result = self.conj(go(child) for child in item.children)
            elif item.op is Op.OR:
                result = self.disj(go(child) for child in item.children)
            elif item.op is Op.IFF:
                result = self.iff(go(item.children[0]), go(item.children[1]))
            else:
                result = go(item.children[0])
            memo[item.uid] = result
            return result

        return go(node)

    def prime(self, node: Node) -> Node:
        return self.rename(node, primed)


def walk(node: Node) -> Iterator[Node]:
    """Each distinct node once, parents before children."""

    seen: set[int] = set()
    stack = [node]
    while stack:
        item = stack.pop()
        if item.uid in seen:
            continue
        seen.add(item.uid)
        yield item
        stack.extend(reversed(item.children))


def atom_keys(node: Node) -> set[str]:
    keys: set[str] = set()
    for item in walk(node):
        if item.key is not None:
            keys.add(item.key)
        if item.other is not None:
            keys.add(item.other)
    return keys


def macro_names(node: Node) -> list[str]:
    """Macros reachable from `node`, dependencies first."""

    order: list[str] = []
    seen: set[str] = set()

    def visit(item: Node) -> None:
        for child in walk(item):
            if child.op is Op.REF and child.name not in seen:
                seen.add(child.name or "")
                visit(child.children[0])
                order.append(child.name or "")

    visit(node)
    return order


def dag_size(node: Node) -> int:
    return sum(1 for _ in walk(node))


__all__ = [
    "GroundBuilder",
    "Node",
    "Op",
    "PRIME",
    "atom_key",
    "atom_keys",
    "dag_size",
    "is_primed",
    "macro_names",
    "primed",
    "unprimed",
    "walk",
]
