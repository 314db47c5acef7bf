"""Concrete evaluation of ground nodes over explicit states."""

from __future__ import annotations

from typing import TYPE_CHECKING, Mapping, Union

from ..errors import UnassignedAtomError
from .ground import Node, Op, primed

if TYPE_CHECKING:
    from .instance import FiniteInstance

State = dict[str, Union[bool, int]]


def _lookup(state: Mapping[str, bool | int], key: str | None) -> bool | int:
    try:
        return state[key or ""]
    except KeyError:
        raise UnassignedAtomError(key or "") from None


def evaluate(node: Node, state: Mapping[str, bool | int]) -> bool:
    """Truth value of `node`; every atom it mentions must be assigned."""

    memo: dict[int, bool] = {}

    def go(item: Node) -> bool:
        done = memo.get(item.uid)
        if done is not None:
            return done
        op = item.op
        if op is Op.CONST:
            result = bool(item.value)
        elif op is Op.ATOM:
            result = bool(_lookup(state, item.key))
        elif op is Op.EQ:
            result = _lookup(state, item.key) == item.value
        elif op is Op.EQV:
            result = _lookup(state, item.key) == _lookup(state, item.other)
        elif op is Op.NOT:
            result = not go(item.children[0])
        elif op is Op.AND:
            result = all(go(child) for child in item.children)
        elif op is Op.OR:
            result = any(go(child) for child in item.children)
        elif op is Op.IFF:
            result = go(item.children[0]) == go(item.children[1])
        else:
            result = go(item.children[0])
        memo[item.uid] = result
        return result

    return go(node)


def complete(instance: "FiniteInstance", state: Mapping[str, bool | int]) -> State:
    """`state` plus the value of every auxiliary atom, computed in dependency order."""

    full: State = {info.key: state[info.key] for info in instance.state_atoms if info.key in state}
    missing = [info.key for info in instance.state_atoms if info.key not in full]
    if missing:
        raise UnassignedAtomError(missing[0])
    for info, body in instance.definition_bodies:
        full[info.key] = evaluate(body, full)
    return full


def evaluate_pair(node: Node, current: Mapping[str, bool | int], following: Mapping[str, bool | int]) -> bool:
    joined: State = dict(current)
    joined.update({primed(key): value for key, value in following.items()})
    return evaluate(node, joined)


def fired_actions(instance: "FiniteInstance", current: Mapping[str, bool | int], following: Mapping[str, bool | int]) -> list[str]:
    """Labels of the action instances that relate the two (completed) states."""

    return [
        item.label
        for item in instance.transition.disjuncts
        if evaluate_pair(item.relation, current, following)
    ]


def init_state(instance: "FiniteInstance") -> State | None:
    """The unique initial state when Init fixes every state atom by a literal."""

    node = instance.init
    literals = node.children if node.op is Op.AND else (node,)
    state: State = {}
    for item in literals:
        if item.op is Op.ATOM:
            state[item.key or ""] = True
        elif item.op is Op.NOT and item.children[0].op is Op.ATOM:
            state[item.children[0].key or ""] = False
        elif item.op is Op.EQ:
            state[item.key or ""] = int(item.value or 0)
        else:
            return None
    if any(info.key not in state for info in instance.state_atoms):
        return None
    return complete(instance, state)


def render_state(instance: "FiniteInstance", state: Mapping[str, bool | int]) -> dict[str, str]:
    """State atoms as printable values: booleans as-is, enumerated atoms by element name."""

    shown: dict[str, str] = {}
    for info in instance.state_atoms:
        value = state.get(info.key)
        if value is None:
            continue
        if info.sort is None:
            shown[info.key] = "true" if value else "false"
        else:
            shown[info.key] = instance.domain(info.sort).constants[int(value)].name
    return shown


__all__ = ["State", "complete", "evaluate", "evaluate_pair", "fired_actions", "init_state", "render_state"]
