"""Finite quantifier expansion of formulas into ground nodes."""

from __future__ import annotations

import itertools
import operator
from typing import TYPE_CHECKING, Callable, NamedTuple, Union

from ..errors import GroundingError
from ..ir import (
    And,
    BoolConst,
    Cmp,
    DomainConst,
    Eq,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    Pred,
    Quant,
    SymbolRole,
    Term,
    Var,
)
from .ground import Node, atom_key, primed

if TYPE_CHECKING:
    from .instance import FiniteInstance

_ORDER: dict[str, Callable[[int, int], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


class EnumAtom(NamedTuple):
    """An enumerated state atom used as a term value."""

    key: str
    sort: str


Value = Union[DomainConst, EnumAtom]
Env = dict[Var, DomainConst]


class Expander:
    """Grounds formulas against one instance; `next_state` primes every state and aux atom."""

    def __init__(self, instance: "FiniteInstance", *, next_state: bool = False) -> None:
        self.instance = instance
        self.protocol = instance.protocol
        self.builder = instance.builder
        self.next_state = next_state

    def _key(self, key: str) -> str:
        return primed(key) if self.next_state else key

    # Terms

    def values(self, term: Term, env: Env) -> list[tuple[Node, Value]]:
        """Guarded alternatives for a term; an enumerated atom stays symbolic."""

        b = self.builder
        if isinstance(term, DomainConst):
            return [(b.true, self._known(term))]
        if isinstance(term, Var):
            try:
                return [(b.true, env[term])]
            except KeyError:
                raise GroundingError(f"unbound variable {term.name}") from None
        if not term.args and term.symbol in self.instance.pins:
            return [(b.true, self.instance.pins[term.symbol])]
        symbol = self.protocol.symbol(term.symbol)
        if symbol.role is not SymbolRole.STATE or symbol.is_relation:
            raise GroundingError(f"{term.symbol} cannot be grounded as a term")
        found: list[tuple[Node, Value]] = []
        for guard, args in self._argument_cases(term.args, env):
            key = atom_key(term.symbol, args)
            found.append((guard, EnumAtom(self._key(key), symbol.result)))
        return found

    def constants(self, term: Term, env: Env) -> list[tuple[Node, DomainConst]]:
        """Guarded alternatives for a term, with enumerated atoms split per element."""

        b = self.builder
        found: list[tuple[Node, DomainConst]] = []
        for guard, value in self.values(term, env):
            if isinstance(value, DomainConst):
                found.append((guard, value))
                continue
            for item in self.instance.domain(value.sort):
                found.append((b.conj((guard, b.eq(value.key, item.index))), item))
        return found

    def _argument_cases(self, args: tuple[Term, ...], env: Env):
        b = self.builder
        options = [self.constants(arg, env) for arg in args]
        for combo in itertools.product(*options):
            guard = b.conj(item[0] for item in combo)
            if guard is b.false:
                continue
            yield guard, tuple(item[1] for item in combo)

    def _known(self, constant: DomainConst) -> DomainConst:
        return self.instance.constant(constant.sort, constant.name)

    # Atoms

    def compare(self, left: Value, right: Value, test: Callable[[int, int], bool]) -> Node:
        b = self.builder
        if isinstance(left, DomainConst) and isinstance(right, DomainConst):
            if left.sort != right.sort:
                raise GroundingError(f"comparing {left.name}:{left.sort} with {right.name}:{right.sort}")
            return b.const(test(left.index, right.index))
        if isinstance(left, EnumAtom) and isinstance(right, DomainConst):
            return b.disj(
                b.eq(left.key, item.index) for item in self.instance.domain(left.sort) if test(item.index, right.index)
            )
        if isinstance(left, DomainConst) and isinstance(right, EnumAtom):
            return b.disj(
                b.eq(right.key, item.index) for item in self.instance.domain(right.sort) if test(left.index, item.index)
            )
        assert isinstance(left, EnumAtom) and isinstance(right, EnumAtom)
        if test is operator.eq:
            return b.eqv(left.key, right.key)
        domain = self.instance.domain(left.sort)
        return b.disj(
            b.conj((b.eq(left.key, x.index), b.eq(right.key, y.index)))
            for x in domain
            for y in domain
            if test(x.index, y.index)
        )

    def _relate(self, left: Term, right: Term, env: Env, test: Callable[[int, int], bool]) -> Node:
        b = self.builder
        cases = []
        for left_guard, left_value in self.values(left, env):
            for right_guard, right_value in self.values(right, env):
                cases.append(b.conj((left_guard, right_guard, self.compare(left_value, right_value, test))))
        return b.disj(cases)

    def _predicate(self, f: Pred, env: Env) -> Node:
        b = self.builder
        if not f.args and f.symbol in self.instance.pins:
            raise GroundingError(f"{f.symbol} is not boolean")
        symbol = self.protocol.symbol(f.symbol)
        if symbol.role is SymbolRole.RIGID:
            raise GroundingError(f"rigid relation {f.symbol} has no interpretation")
        cases = []
        for guard, args in self._argument_cases(f.args, env):
            cases.append(b.conj((guard, b.atom(self._key(atom_key(f.symbol, args))))))
        return b.disj(cases)

    def _member(self, f: Member, env: Env) -> Node:
        b = self.builder
        cases = []
        for element_guard, element in self.constants(f.element, env):
            for subset_guard, subset in self.constants(f.subset, env):
                if self.instance.member(element, subset):
                    cases.append(b.conj((element_guard, subset_guard)))
        return b.disj(cases)

    # Formulas

    def formula(self, f: Formula, env: Env | None = None) -> Node:
        return self._formula(f, dict(env or {}))

    def _formula(self, f: Formula, env: Env) -> Node:
        b = self.builder
        if isinstance(f, BoolConst):
            return b.const(f.value)
        if isinstance(f, Pred):
            return self._predicate(f, env)
        if isinstance(f, Eq):
            return self._relate(f.left, f.right, env, operator.eq)
        if isinstance(f, Cmp):
            return self._relate(f.left, f.right, env, _ORDER[f.op])
        if isinstance(f, Member):
            return self._member(f, env)
        if isinstance(f, Not):
            return b.neg(self._formula(f.body, env))
        if isinstance(f, And):
            return b.conj(self._formula(item, env) for item in f.items)
        if isinstance(f, Or):
            return b.disj(self._formula(item, env) for item in f.items)
        if isinstance(f, Implies):
            return b.implies(self._formula(f.left, env), self._formula(f.right, env))
        if isinstance(f, Iff):
            return b.iff(self._formula(f.left, env), self._formula(f.right, env))
        if isinstance(f, Quant):
            return self._quantifier(f, env)
        raise TypeError(f"cannot expand {type(f).__name__}")

    def _quantifier(self, f: Quant, env: Env) -> Node:
        b = self.builder
        parts = []
        combine = b.conj if f.is_forall else b.disj
        absorbing = b.false if f.is_forall else b.true
        for combo in self.instance.tuples(tuple(var.sort for var in f.vars)):
            inner = dict(env)
            inner.update(zip(f.vars, combo))
            part = self._formula(f.body, inner)
            if part is absorbing:
                return absorbing
            parts.append(part)
        return combine(parts)


def expand(f: Formula, instance: "FiniteInstance", *, next_state: bool = False) -> Node:
    """Quantifier-free ground form of `f`; definitions become auxiliary atoms."""

    return Expander(instance, next_state=next_state).formula(f)


__all__ = ["EnumAtom", "Expander", "expand"]
