"""Protocol descriptions: sorts, symbols, definitions, actions and their validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from ..errors import Diagnostic, SortError
from .formulas import (
    BOOL,
    ORDER_OPS,
    App,
    Cmp,
    DomainConst,
    Eq,
    Formula,
    Member,
    Pred,
    Quant,
    Sort,
    Symbol,
    SymbolRole,
    Term,
    Var,
    children,
    free_vars,
    symbols_of,
    term_vars,
)


class UpdateKind(str, Enum):
    UNCHANGED = "unchanged"
    POINTWISE = "pointwise"


@dataclass(frozen=True)
class PointUpdate:
    """One EXCEPT entry: the value at `args` becomes `value`."""

    args: tuple[Term, ...]
    value: Formula | Term


@dataclass(frozen=True)
class Update:
    symbol: str
    kind: UpdateKind
    points: tuple[PointUpdate, ...] = ()


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[Var, ...]
    body: Formula
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Axiom:
    name: str
    formula: Formula
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Action:
    name: str
    params: tuple[Var, ...]
    guard: Formula
    updates: tuple[Update, ...]
    line: int | None = field(default=None, compare=False)

    def update_for(self, symbol: str) -> Update | None:
        for update in self.updates:
            if update.symbol == symbol:
                return update
        return None


@dataclass(frozen=True)
class Protocol:
    name: str
    sorts: tuple[Sort, ...]
    symbols: tuple[Symbol, ...]
    definitions: tuple[Definition, ...]
    axioms: tuple[Axiom, ...]
    actions: tuple[Action, ...]
    init: Formula
    safety: Formula

    @cached_property
    def _sorts(self) -> dict[str, Sort]:
        return {item.name: item for item in self.sorts}

    @cached_property
    def _symbols(self) -> dict[str, Symbol]:
        table = {item.name: item for item in self.symbols}
        for sort in self.sorts:
            if sort.is_ordered and sort.minimum and sort.minimum not in table:
                table[sort.minimum] = Symbol(sort.minimum, (), sort.name, SymbolRole.RIGID)
        return table

    @cached_property
    def _definitions(self) -> dict[str, Definition]:
        return {item.name: item for item in self.definitions}

    def sort(self, name: str) -> Sort:
        try:
            return self._sorts[name]
        except KeyError:
            raise SortError(f"unknown sort {name!r} in protocol {self.name}") from None

    def has_sort(self, name: str) -> bool:
        return name in self._sorts

    def symbol(self, name: str) -> Symbol:
        try:
            return self._symbols[name]
        except KeyError:
            raise SortError(f"unknown symbol {name!r} in protocol {self.name}") from None

    def has_symbol(self, name: str) -> bool:
        return name in self._symbols

    def definition(self, name: str) -> Definition:
        try:
            return self._definitions[name]
        except KeyError:
            raise SortError(f"unknown definition {name!r} in protocol {self.name}") from None

    def has_definition(self, name: str) -> bool:
        return name in self._definitions

    @property
    def state_symbols(self) -> tuple[Symbol, ...]:
        return tuple(item for item in self.symbols if item.role is SymbolRole.STATE)

    @property
    def rigid_constants(self) -> tuple[Symbol, ...]:
        """Nullary rigid symbols of symmetric sorts, in declaration order."""

        return tuple(
            item
            for item in self.symbols
            if item.role is SymbolRole.RIGID and not item.arg_sorts and self.has_sort(item.result)
            and self.sort(item.result).is_symmetric
        )

    def definition_order(self) -> list[Definition]:
        """Definitions sorted so each one follows those it applies."""

        ordered: list[Definition] = []
        done: set[str] = set()

        def visit(item: Definition, trail: tuple[str, ...]) -> None:
            if item.name in done:
                return
            if item.name in trail:
                raise SortError(f"definition cycle through {item.name}")
            for name in sorted(symbols_of(item.body)):
                if self.has_definition(name):
                    visit(self.definition(name), trail + (item.name,))
            done.add(item.name)
            ordered.append(item)

        for item in self.definitions:
            visit(item, ())
        return ordered

    def with_definitions(self, extra: list[Definition]) -> "Protocol":
        known = {item.name for item in self.definitions}
        added = [item for item in extra if item.name not in known]
        if not added:
            return self
        symbols = self.symbols + tuple(
            Symbol(item.name, tuple(var.sort for var in item.params), BOOL, SymbolRole.DEFINITION,
                   tuple(var.name for var in item.params))
            for item in added
        )
        return Protocol(
            name=self.name,
            sorts=self.sorts,
            symbols=symbols,
            definitions=self.definitions + tuple(added),
            axioms=self.axioms,
            actions=self.actions,
            init=self.init,
            safety=self.safety,
        )


# Sort checking


def term_sort(term: Term, protocol: Protocol) -> str:
    if isinstance(term, Var):
        return term.sort
    if isinstance(term, DomainConst):
        return term.sort
    symbol = protocol.symbol(term.symbol)
    if symbol.is_relation:
        raise SortError(f"boolean symbol {term.symbol} used as a term")
    return symbol.result


class _Checker:
    def __init__(self, protocol: Protocol, line: int | None) -> None:
        self.protocol = protocol
        self.line = line
        self.issues: list[Diagnostic] = []

    def report(self, code: str, message: str) -> None:
        self.issues.append(Diagnostic(code, message, self.line))

    def term(self, term: Term) -> str | None:
        if isinstance(term, Var):
            if not self.protocol.has_sort(term.sort):
                self.report("unknown-sort", f"variable {term.name} has unknown sort {term.sort}")
                return None
            return term.sort
        if isinstance(term, DomainConst):
            return term.sort
        if not self.protocol.has_symbol(term.symbol):
            self.report("unknown-symbol", f"unknown symbol {term.symbol}")
            return None
        symbol = self.protocol.symbol(term.symbol)
        if symbol.is_relation:
            self.report("ill-sorted-term", f"boolean symbol {term.symbol} used as a term")
            return None
        self.arguments(symbol, term.args)
        return symbol.result

    def arguments(self, symbol: Symbol, args: tuple[Term, ...]) -> None:
        if len(args) != symbol.arity:
            self.report(
                "arity-mismatch",
                f"{symbol.name} expects {symbol.arity} arguments, got {len(args)}",
            )
            return
        for position, (arg, expected) in enumerate(zip(args, symbol.arg_sorts), start=1):
            actual = self.term(arg)
            if actual is not None and actual != expected:
                self.report(
                    "ill-sorted-argument",
                    f"argument {position} of {symbol.name} has sort {actual}, expected {expected}",
                )

    def formula(self, f: Formula) -> None:
        if isinstance(f, Pred):
            if not self.protocol.has_symbol(f.symbol):
                self.report("unknown-symbol", f"unknown symbol {f.symbol}")
                return
            symbol = self.protocol.symbol(f.symbol)
            if not symbol.is_relation:
                self.report("ill-sorted-atom", f"{f.symbol} is not boolean")
                return
            self.arguments(symbol, f.args)
        elif isinstance(f, Eq):
            left, right = self.term(f.left), self.term(f.right)
            if left and right and left != right:
                self.report("ill-sorted-atom", f"equality between sorts {left} and {right}")
        elif isinstance(f, Cmp):
            if f.op not in ORDER_OPS:
                self.report("ill-sorted-atom", f"unknown order operator {f.op}")
            left, right = self.term(f.left), self.term(f.right)
            for sort in {left, right} - {None}:
                if not self.protocol.sort(sort).is_ordered:
                    self.report("ill-sorted-atom", f"order atom over non-ordered sort {sort}")
            if left and right and left != right:
                self.report("ill-sorted-atom", f"order atom between sorts {left} and {right}")
        elif isinstance(f, Member):
            element, subset = self.term(f.element), self.term(f.subset)
            if subset is not None:
                sort = self.protocol.sort(subset)
                if not sort.is_subset:
                    self.report("ill-sorted-atom", f"member over non-subset sort {subset}")
                elif element is not None and element != sort.base:
                    self.report("ill-sorted-atom", f"member of {subset} needs a {sort.base}, got {element}")
        elif isinstance(f, Quant):
            body_free = free_vars(f.body)
            for var in f.vars:
                self.term(var)
                if var not in body_free:
                    self.report("unused-variable", f"quantified variable {var.name} is not used")
            self.formula(f.body)
        else:
            for child in children(f):
                self.formula(child)


def check_formula(
    f: Formula,
    protocol: Protocol,
    *,
    allowed: set[Var] | frozenset[Var] = frozenset(),
    line: int | None = None,
    where: str = "formula",
) -> list[Diagnostic]:
    checker = _Checker(protocol, line)
    checker.formula(f)
    for var in sorted(free_vars(f) - set(allowed), key=lambda item: item.name):
        checker.report("unbound-variable", f"{where} uses unbound variable {var.name}")
    return checker.issues


def _check_sorts(protocol: Protocol) -> list[Diagnostic]:
    issues: list[Diagnostic] = []
    seen: set[str] = set()
    for sort in protocol.sorts:
        if sort.name in seen:
            issues.append(Diagnostic("duplicate-sort", f"sort {sort.name} declared twice", sort.line))
        seen.add(sort.name)
        if sort.is_subset:
            base = protocol._sorts.get(sort.base or "")
            if base is None or not base.is_symmetric:
                issues.append(Diagnostic(
                    "bad-subset-base",
                    f"subset sort {sort.name} needs an existing symmetric base, got {sort.base}",
                    sort.line,
                ))
        if sort.is_ordered and not sort.minimum:
            issues.append(Diagnostic("missing-minimum", f"ordered sort {sort.name} has no minimum", sort.line))
    return issues


def _check_symbols(protocol: Protocol) -> list[Diagnostic]:
    issues: list[Diagnostic] = []
    seen: dict[str, SymbolRole] = {}
    for symbol in protocol.symbols:
        if symbol.name in seen:
            issues.append(Diagnostic(
                "duplicate-symbol",
                f"symbol {symbol.name} declared as both {seen[symbol.name].value} and {symbol.role.value}",
                symbol.line,
            ))
        seen[symbol.name] = symbol.role
        for sort in symbol.arg_sorts + ((symbol.result,) if symbol.result != BOOL else ()):
            if not protocol.has_sort(sort):
                issues.append(Diagnostic("unknown-sort", f"{symbol.name} mentions unknown sort {sort}", symbol.line))
    return issues


def _check_definitions(protocol: Protocol) -> list[Diagnostic]:
    issues: list[Diagnostic] = []
    for item in protocol.definitions:
        params = set(item.params)
        issues += check_formula(item.body, protocol, allowed=params, line=item.line, where=item.name)
        unused = params - free_vars(item.body)
        for var in sorted(unused, key=lambda v: v.name):
            issues.append(Diagnostic(
                "unused-parameter", f"definition {item.name} ignores parameter {var.name}", item.line,
            ))
    try:
        protocol.definition_order()
    except SortError as exc:
        issues.append(Diagnostic("definition-cycle", str(exc)))
    return issues


def _check_action(protocol: Protocol, action: Action) -> list[Diagnostic]:
    issues: list[Diagnostic] = []
    params = set(action.params)
    issues += check_formula(action.guard, protocol, allowed=params, line=action.line, where=action.name)
    counts: dict[str, int] = {}
    for update in action.updates:
        counts[update.symbol] = counts.get(update.symbol, 0) + 1
        if not protocol.has_symbol(update.symbol) or protocol.symbol(update.symbol).role is not SymbolRole.STATE:
            issues.append(Diagnostic(
                "update-non-state", f"{action.name} updates non-state symbol {update.symbol}", action.line,
            ))
            continue
        symbol = protocol.symbol(update.symbol)
        for point in update.points:
            checker = _Checker(protocol, action.line)
            checker.arguments(symbol, point.args)
            if symbol.is_relation:
                if not _is_formula(point.value):
                    checker.report("ill-sorted-update", f"{action.name} assigns a term to relation {symbol.name}")
                else:
                    checker.formula(point.value)
            elif _is_formula(point.value):
                checker.report("ill-sorted-update", f"{action.name} assigns a formula to function {symbol.name}")
            else:
                actual = checker.term(point.value)
                if actual is not None and actual != symbol.result:
                    checker.report(
                        "ill-sorted-update",
                        f"{action.name} assigns a {actual} to {symbol.name}, expected {symbol.result}",
                    )
            issues += checker.issues
            used: set[Var] = set()
            for arg in point.args:
                used |= term_vars(arg)
            if _is_formula(point.value):
                used |= free_vars(point.value)
            else:
                used |= term_vars(point.value)
            for var in sorted(used - params, key=lambda v: v.name):
                issues.append(Diagnostic(
                    "unbound-variable", f"{action.name} update uses unbound variable {var.name}", action.line,
                ))
    for symbol in protocol.state_symbols:
        count = counts.get(symbol.name, 0)
        if count == 0:
            issues.append(Diagnostic(
                "missing-update", f"{action.name} does not update or keep {symbol.name}", action.line,
            ))
        elif count > 1:
            issues.append(Diagnostic(
                "duplicate-update", f"{action.name} updates {symbol.name} more than once", action.line,
            ))
    return issues


def _is_formula(value: object) -> bool:
    return not isinstance(value, (Var, App, DomainConst))


def validate(protocol: Protocol) -> list[Diagnostic]:
    """Return one diagnostic per violated structural invariant; empty means well-formed."""

    issues = _check_sorts(protocol)
    issues += _check_symbols(protocol)
    if issues:
        return issues
    issues += _check_definitions(protocol)
    for axiom in protocol.axioms:
        issues += check_formula(axiom.formula, protocol, line=axiom.line, where=f"axiom {axiom.name}")
        state = {item.name for item in protocol.state_symbols}
        if symbols_of(axiom.formula) & state:
            issues.append(Diagnostic("axiom-not-rigid", f"axiom {axiom.name} mentions state symbols", axiom.line))
    for action in protocol.actions:
        issues += _check_action(protocol, action)
    issues += check_formula(protocol.init, protocol, where="init")
    issues += check_formula(protocol.safety, protocol, where="safety")
    return issues


__all__ = [
    "Action",
    "Axiom",
    "Definition",
    "PointUpdate",
    "Protocol",
    "Update",
    "UpdateKind",
    "check_formula",
    "term_sort",
    "validate",
]
