"""Pretty-printing protocols, formulas and assertion files back to s-expressions."""

from __future__ import annotations

from ..boost.assertions import QuantifiedAssertion
from ..ir import (
    BOOL,
    And,
    App,
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
    Protocol,
    Quant,
    QuorumPolicyKind,
    Sort,
    SymbolRole,
    Term,
    UpdateKind,
    Var,
)
from .documents import AssertionFile, RefinementMapping


def term_text(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, DomainConst):
        return f"(@ {term.sort} {term.name} {term.index})"
    if not term.args:
        return term.symbol
    return "(" + " ".join([term.symbol, *(term_text(arg) for arg in term.args)]) + ")"


def _bindings(variables: tuple[Var, ...]) -> str:
    return "(" + " ".join(f"({var.name} {var.sort})" for var in variables) + ")"


def formula_text(f: Formula) -> str:
    if isinstance(f, BoolConst):
        return "true" if f.value else "false"
    if isinstance(f, Pred):
        if not f.args:
            return f.symbol
        return "(" + " ".join([f.symbol, *(term_text(arg) for arg in f.args)]) + ")"
    if isinstance(f, Eq):
        return f"(= {term_text(f.left)} {term_text(f.right)})"
    if isinstance(f, Cmp):
        return f"({f.op} {term_text(f.left)} {term_text(f.right)})"
    if isinstance(f, Member):
        return f"(member {term_text(f.element)} {term_text(f.subset)})"
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"(!= {term_text(f.body.left)} {term_text(f.body.right)})"
        return f"(not {formula_text(f.body)})"
    if isinstance(f, And):
        return "(" + " ".join(["and", *(formula_text(item) for item in f.items)]) + ")"
    if isinstance(f, Or):
        return "(" + " ".join(["or", *(formula_text(item) for item in f.items)]) + ")"
    if isinstance(f, Implies):
        return f"(=> {formula_text(f.left)} {formula_text(f.right)})"
    if isinstance(f, Iff):
        return f"(<=> {formula_text(f.left)} {formula_text(f.right)})"
    if isinstance(f, Quant):
        return f"({f.kind} {_bindings(f.vars)} {formula_text(f.body)})"
    raise TypeError(f"cannot print {type(f).__name__}")


def _value_text(value: Formula | Term) -> str:
    if isinstance(value, (Var, App, DomainConst)):
        return term_text(value)
    return formula_text(value)


def _sort_text(sort: Sort) -> str:
    if sort.is_symmetric:
        kind = "symmetric"
    elif sort.is_ordered:
        kind = f"(ordered {sort.minimum})"
    else:
        policy = sort.policy
        if policy is None or policy.kind is QuorumPolicyKind.MAJORITY:
            rule = "majority"
        elif policy.kind is QuorumPolicyKind.SIZE:
            rule = f"(size {policy.size})"
        else:
            groups = " ".join("(" + " ".join(str(index) for index in group) + ")" for group in policy.members)
            rule = f"(explicit {groups})"
        kind = f"(subsets-of {sort.base} {rule})"
    return f"(sort {sort.name} {kind})"


def _arguments(sorts: tuple[str, ...], names: tuple[str, ...]) -> list[str]:
    if names:
        return [f"({name} {sort})" for name, sort in zip(names, sorts)]
    return list(sorts)


def protocol_text(protocol: Protocol) -> str:
    lines = [f"(protocol {protocol.name}"]
    lines += [f"  {_sort_text(sort)}" for sort in protocol.sorts]
    for symbol in protocol.symbols:
        if symbol.role is SymbolRole.RIGID:
            lines.append(f"  (constant {symbol.name} {symbol.result})")
        elif symbol.role is SymbolRole.STATE and symbol.result == BOOL:
            lines.append("  " + "(" + " ".join(["relation", symbol.name, *_arguments(symbol.arg_sorts, symbol.arg_names)]) + ")")
        elif symbol.role is SymbolRole.STATE:
            args = " ".join(_arguments(symbol.arg_sorts, symbol.arg_names))
            lines.append(f"  (function {symbol.name} ({args}) {symbol.result})")
    for axiom in protocol.axioms:
        lines.append(f"  (axiom {axiom.name}")
        lines.append(f"    {formula_text(axiom.formula)})")
    for definition in protocol.definitions:
        lines.append(f"  (definition {definition.name} {_bindings(definition.params)}")
        lines.append(f"    {formula_text(definition.body)})")
    for action in protocol.actions:
        lines.append(f"  (action {action.name} {_bindings(action.params)}")
        lines.append(f"    (guard {formula_text(action.guard)})")
        for update in action.updates:
            if update.kind is UpdateKind.UNCHANGED:
                lines.append(f"    (unchanged {update.symbol})")
                continue
            entries = " ".join(
                "((" + " ".join(term_text(arg) for arg in point.args) + ") " + _value_text(point.value) + ")"
                for point in update.points
            )
            lines.append(f"    (update {update.symbol} {entries})")
        lines[-1] += ")"
    lines.append(f"  (init {formula_text(protocol.init)})")
    lines.append(f"  (safety {formula_text(protocol.safety)}))")
    return "\n".join(lines) + "\n"


def assertion_text(assertion: QuantifiedAssertion) -> str:
    return f"(assert {assertion.name} {formula_text(assertion.formula())})"


def assertions_text(document: AssertionFile | list[QuantifiedAssertion], protocol: str | None = None) -> str:
    if isinstance(document, AssertionFile):
        owner, items = document.protocol, list(document.assertions)
    else:
        owner, items = protocol, document
    lines = [f"(assertions {owner}"]
    lines += [f"  {assertion_text(item)}" for item in items]
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def mapping_text(mapping: RefinementMapping) -> str:
    lines = [f"(mapping (from {mapping.low}) (to {mapping.high})"]
    for entry in mapping.symbols:
        extra = f" (extra forall {entry.extra})" if entry.extra else ""
        lines.append(f"  (map {entry.high} {entry.low}{extra})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


__all__ = [
    "assertion_text",
    "assertions_text",
    "formula_text",
    "mapping_text",
    "protocol_text",
    "term_text",
]
