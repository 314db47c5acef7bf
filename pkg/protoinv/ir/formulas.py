"""Sorted first-order terms and formulas shared by every protoinv module."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Mapping, Union

from ..errors import SortError

BOOL = "bool"
ORDER_OPS = ("<", "<=", ">", ">=")


class SortKind(str, Enum):
    SYMMETRIC = "symmetric"
    ORDERED = "ordered"
    SUBSET = "subset"


class QuorumPolicyKind(str, Enum):
    MAJORITY = "majority"
    SIZE = "size"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class QuorumPolicy:
    kind: QuorumPolicyKind = QuorumPolicyKind.MAJORITY
    size: int | None = None
    members: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class Sort:
    name: str
    kind: SortKind
    base: str | None = None
    policy: QuorumPolicy | None = None
    minimum: str | None = None
    line: int | None = field(default=None, compare=False)

    @property
    def is_symmetric(self) -> bool:
        return self.kind is SortKind.SYMMETRIC

    @property
    def is_ordered(self) -> bool:
        return self.kind is SortKind.ORDERED

    @property
    def is_subset(self) -> bool:
        return self.kind is SortKind.SUBSET


class SymbolRole(str, Enum):
    STATE = "state"
    DEFINITION = "definition"
    RIGID = "rigid"


@dataclass(frozen=True)
class Symbol:
    name: str
    arg_sorts: tuple[str, ...]
    result: str
    role: SymbolRole
    arg_names: tuple[str, ...] = ()
    line: int | None = field(default=None, compare=False)

    @property
    def is_relation(self) -> bool:
        return self.result == BOOL

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


# Terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class App:
    """Application of a non-boolean state or rigid symbol."""

    symbol: str
    args: tuple["Term", ...] = ()


@dataclass(frozen=True)
class DomainConst:
    """A constant of a finite instance; `index` is its position in the sort table."""

    sort: str
    name: str
    index: int = 0


Term = Union[Var, App, DomainConst]


# Formulas


@dataclass(frozen=True)
class BoolConst:
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class Pred:
    """Application of a boolean state, rigid or definition symbol."""

    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Member:
    element: Term
    subset: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str
    vars: tuple[Var, ...]
    body: "Formula"

    @property
    def is_forall(self) -> bool:
        return self.kind == "forall"


Formula = Union[BoolConst, Pred, Eq, Cmp, Member, Not, And, Or, Implies, Iff, Quant]


def conjoin(items: list[Formula] | tuple[Formula, ...]) -> Formula:
    parts = tuple(item for item in items if item != TRUE)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disjoin(items: list[Formula] | tuple[Formula, ...]) -> Formula:
    parts = tuple(item for item in items if item != FALSE)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.items
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Quant):
        return (f.body,)
    return ()


def atom_terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, Pred):
        return f.args
    if isinstance(f, (Eq, Cmp)):
        return (f.left, f.right)
    if isinstance(f, Member):
        return (f.element, f.subset)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def walk_terms(term: Term) -> Iterator[Term]:
    yield term
    if isinstance(term, App):
        for arg in term.args:
            yield from walk_terms(arg)


def term_vars(term: Term) -> set[Var]:
    return {item for item in walk_terms(term) if isinstance(item, Var)}


def free_vars(f: Formula) -> set[Var]:
    if isinstance(f, Quant):
        return free_vars(f.body) - set(f.vars)
    found: set[Var] = set()
    for term in atom_terms(f):
        found |= term_vars(term)
    for child in children(f):
        found |= free_vars(child)
    return found


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def symbols_of(f: Formula) -> set[str]:
    names: set[str] = set()
    for node in walk(f):
        if isinstance(node, Pred):
            names.add(node.symbol)
        for term in atom_terms(node):
            names.update(item.symbol for item in walk_terms(term) if isinstance(item, App))
    return names


def substitute_term(term: Term, binding: Mapping[Var, Term]) -> Term:
    if isinstance(term, Var):
        return binding.get(term, term)
    if isinstance(term, App) and term.args:
        return App(term.symbol, tuple(substitute_term(arg, binding) for arg in term.args))
    return term


def _fresh_name(base: str, taken: set[str]) -> str:
    counter = 1
    while f"{base}_{counter}" in taken:
        counter += 1
    return f"{base}_{counter}"


def substitute(f: Formula, binding: Mapping[Var, Term]) -> Formula:
    """Capture-avoiding substitution of variables by terms."""

    if not binding:
        return f
    for var, term in binding.items():
        if isinstance(term, Var) and term.sort != var.sort:
            raise SortError(f"cannot bind {var.name}:{var.sort} to {term.name}:{term.sort}")
        if isinstance(term, DomainConst) and term.sort != var.sort:
            raise SortError(f"cannot bind {var.name}:{var.sort} to constant {term.name}:{term.sort}")
    return _substitute(f, dict(binding))


def _substitute(f: Formula, binding: dict[Var, Term]) -> Formula:
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Pred):
        return Pred(f.symbol, tuple(substitute_term(arg, binding) for arg in f.args))
    if isinstance(f, Eq):
        return Eq(substitute_term(f.left, binding), substitute_term(f.right, binding))
    if isinstance(f, Cmp):
        return Cmp(f.op, substitute_term(f.left, binding), substitute_term(f.right, binding))
    if isinstance(f, Member):
        return Member(substitute_term(f.element, binding), substitute_term(f.subset, binding))
    if isinstance(f, Not):
        return Not(_substitute(f.body, binding))
    if isinstance(f, And):
        return And(tuple(_substitute(item, binding) for item in f.items))
    if isinstance(f, Or):
        return Or(tuple(_substitute(item, binding) for item in f.items))
    if isinstance(f, Implies):
        return Implies(_substitute(f.left, binding), _substitute(f.right, binding))
    if isinstance(f, Iff):
        return Iff(_substitute(f.left, binding), _substitute(f.right, binding))
    if isinstance(f, Quant):
        inner = {var: term for var, term in binding.items() if var not in f.vars}
        if not inner:
            return f
        incoming = {var.name for term in inner.values() for var in term_vars(term)}
        taken = incoming | {var.name for var in inner} | {var.name for var in free_vars(f.body)}
        renamed: list[Var] = []
        for var in f.vars:
            if var.name in incoming:
                fresh = Var(_fresh_name(var.name, taken), var.sort)
                taken.add(fresh.name)
                inner[var] = fresh
                renamed.append(fresh)
            else:
                renamed.append(var)
        return Quant(f.kind, tuple(renamed), _substitute(f.body, inner))
    raise TypeError(f"unsupported formula node {type(f).__name__}")


def rename_symbols(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename applied symbols; arities are left untouched."""

    def term(t: Term) -> Term:
        if isinstance(t, App):
            return App(mapping.get(t.symbol, t.symbol), tuple(term(arg) for arg in t.args))
        return t

    def go(node: Formula) -> Formula:
        if isinstance(node, Pred):
            return Pred(mapping.get(node.symbol, node.symbol), tuple(term(arg) for arg in node.args))
        if isinstance(node, Eq):
            return Eq(term(node.left), term(node.right))
        if isinstance(node, Cmp):
            return Cmp(node.op, term(node.left), term(node.right))
        if isinstance(node, Member):
            return Member(term(node.element), term(node.subset))
        if isinstance(node, Not):
            return Not(go(node.body))
        if isinstance(node, And):
            return And(tuple(go(item) for item in node.items))
        if isinstance(node, Or):
            return Or(tuple(go(item) for item in node.items))
        if isinstance(node, Implies):
            return Implies(go(node.left), go(node.right))
        if isinstance(node, Iff):
            return Iff(go(node.left), go(node.right))
        if isinstance(node, Quant):
            return Quant(node.kind, node.vars, go(node.body))
        return node

    return go(f)


def map_terms(f: Formula, fn: Callable[[Term], Term]) -> Formula:
    """Rebuild `f` with every maximal atom argument passed through `fn` (bottom-up)."""

    def term(t: Term) -> Term:
        if isinstance(t, App) and t.args:
            t = App(t.symbol, tuple(term(arg) for arg in t.args))
        return fn(t)

    def go(node: Formula) -> Formula:
        if isinstance(node, Pred):
            return Pred(node.symbol, tuple(term(arg) for arg in node.args))
        if isinstance(node, Eq):
            return Eq(term(node.left), term(node.right))
        if isinstance(node, Cmp):
            return Cmp(node.op, term(node.left), term(node.right))
        if isinstance(node, Member):
            return Member(term(node.element), term(node.subset))
        if isinstance(node, Not):
            return Not(go(node.body))
        if isinstance(node, And):
            return And(tuple(go(item) for item in node.items))
        if isinstance(node, Or):
            return Or(tuple(go(item) for item in node.items))
        if isinstance(node, Implies):
            return Implies(go(node.left), go(node.right))
        if isinstance(node, Iff):
            return Iff(go(node.left), go(node.right))
        if isinstance(node, Quant):
            return Quant(node.kind, node.vars, go(node.body))
        return node

    return go(f)


def replace_constants(f: Formula, mapping: Mapping[DomainConst, Term]) -> Formula:
    if not mapping:
        return f
    return map_terms(f, lambda t: mapping.get(t, t) if isinstance(t, DomainConst) else t)


def constants_of(f: Formula, sort: str, *, ordered: bool = False) -> list[DomainConst]:
    """Distinct instance constants of `sort` in `f`.

    Ordered sorts come back in domain order, other sorts in first-occurrence order.
    """

    seen: dict[DomainConst, None] = {}
    for node in walk(f):
        for top in atom_terms(node):
            for item in walk_terms(top):
                if isinstance(item, DomainConst) and item.sort == sort:
                    seen.setdefault(item, None)
    if ordered:
        return sorted(seen, key=lambda item: item.index)
    return list(seen)


__all__ = [
    "And",
    "App",
    "BOOL",
    "BoolConst",
    "Cmp",
    "DomainConst",
    "Eq",
    "FALSE",
    "Formula",
    "Iff",
    "Implies",
    "Member",
    "Not",
    "ORDER_OPS",
    "Or",
    "Pred",
    "Quant",
    "QuorumPolicy",
    "QuorumPolicyKind",
    "Sort",
    "SortKind",
    "Symbol",
    "SymbolRole",
    "TRUE",
    "Term",
    "Var",
    "atom_terms",
    "children",
    "conjoin",
    "constants_of",
    "disjoin",
    "free_vars",
    "is_closed",
    "map_terms",
    "rename_symbols",
    "replace_constants",
    "substitute",
    "substitute_term",
    "symbols_of",
    "term_vars",
    "walk",
    "walk_terms",
]
