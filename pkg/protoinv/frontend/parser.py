"""Parsers for `.ptp`, `.inv`, `.map` and `.hchy` files."""

from __future__ import annotations

from pathlib import Path

from ..boost.assertions import from_formula
from ..errors import ParseError, ValidationError
from ..ir import (
    BOOL,
    FALSE,
    TRUE,
    Action,
    And,
    App,
    Axiom,
    Cmp,
    Definition,
    DomainConst,
    Eq,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    PointUpdate,
    Pred,
    Protocol,
    Quant,
    QuorumPolicy,
    QuorumPolicyKind,
    Sort,
    SortKind,
    Symbol,
    SymbolRole,
    Term,
    Update,
    UpdateKind,
    Var,
    check_formula,
    validate,
)
from .documents import AssertionFile, HierarchyConfig, HierarchyLevel, RefinementMapping, SymbolMap
from .sexpr import Atom, SExpr, SList, read_all, read_one

_CONNECTIVES = {"and", "or", "not", "=>", "<=>"}
_COMPARISONS = {"<", "<=", ">", ">="}


def _fail(message: str, node: SExpr) -> ParseError:
    return ParseError(message, node.line, node.column)


def _ident(node: SExpr, what: str) -> str:
    if not isinstance(node, Atom) or node.quoted:
        raise _fail(f"expected {what}", node)
    return node.text


def _string(node: SExpr, what: str) -> str:
    if not isinstance(node, Atom):
        raise _fail(f"expected {what}", node)
    return node.text


def _int(node: SExpr, what: str) -> int:
    text = _ident(node, what)
    try:
        return int(text)
    except ValueError:
        raise _fail(f"expected integer {what}, got {text!r}", node) from None


def _form(node: SExpr, head: str | None = None, minimum: int = 1) -> SList:
    if not isinstance(node, SList) or len(node) < minimum:
        raise _fail(f"expected ({head or '...'} ...)", node)
    if head is not None and node.head() != head:
        raise _fail(f"expected ({head} ...), got ({node.head()} ...)", node)
    return node


class FormulaReader:
    """Turns s-expressions into formulas; variables resolve through a lexical scope."""

    def __init__(self, scope: dict[str, Var] | None = None) -> None:
        self.scope: dict[str, Var] = dict(scope or {})

    def bindings(self, node: SExpr) -> tuple[Var, ...]:
        group = _form(node, minimum=0)
        variables: list[Var] = []
        for item in group.items:
            pair = _form(item, minimum=2)
            if len(pair) != 2:
                raise _fail("expected (name sort)", pair)
            variables.append(Var(_ident(pair.items[0], "variable name"), _ident(pair.items[1], "sort name")))
        return tuple(variables)

    def term(self, node: SExpr) -> Term:
        if isinstance(node, Atom):
            if node.quoted:
                raise _fail("strings are not terms", node)
            if node.text in self.scope:
                return self.scope[node.text]
            return App(node.text)
        form = _form(node)
        head = _ident(form.items[0], "symbol name")
        if head == "@":
            if len(form) != 4:
                raise _fail("expected (@ sort constant index)", form)
            return DomainConst(
                _ident(form.items[1], "sort"), _ident(form.items[2], "constant"), _int(form.items[3], "index")
            )
        return App(head, tuple(self.term(item) for item in form.items[1:]))

    def formula(self, node: SExpr) -> Formula:
        if isinstance(node, Atom):
            if node.quoted:
                raise _fail("strings are not formulas", node)
            if node.text == "true":
                return TRUE
            if node.text == "false":
                return FALSE
            if node.text in self.scope:
                raise _fail(f"variable {node.text} used as a formula", node)
            return Pred(node.text)
        form = _form(node)
        head = _ident(form.items[0], "operator")
        args = form.items[1:]
        if head in {"forall", "exists"}:
            if len(args) != 2:
                raise _fail(f"expected ({head} (bindings) body)", form)
            variables = self.bindings(args[0])
            inner = FormulaReader({**self.scope, **{var.name: var for var in variables}})
            return Quant(head, variables, inner.formula(args[1]))
        if head in _CONNECTIVES:
            parts = tuple(self.formula(item) for item in args)
            if head == "and":
                return And(parts)
            if head == "or":
                return Or(parts)
            if head == "not":
                if len(parts) != 1:
                    raise _fail("not takes one argument", form)
                return Not(parts[0])
            if len(parts) != 2:
                raise _fail(f"{head} takes two arguments", form)
            return Implies(*parts) if head == "=>" else Iff(*parts)
        if head in {"=", "!="}:
            if len(args) != 2:
                raise _fail(f"{head} takes two arguments", form)
            atom = Eq(self.term(args[0]), self.term(args[1]))
            return atom if head == "=" else Not(atom)
        if head in _COMPARISONS:
            if len(args) != 2:
                raise _fail(f"{head} takes two arguments", form)
            return Cmp(head, self.term(args[0]), self.term(args[1]))
        if head == "member":
            if len(args) != 2:
                raise _fail("member takes two arguments", form)
            return Member(self.term(args[0]), self.term(args[1]))
        return Pred(head, tuple(self.term(item) for item in args))


def parse_formula(text: str, scope: dict[str, Var] | None = None) -> Formula:
    return FormulaReader(scope).formula(read_one(text))


# Protocols


def _parse_sort(form: SList) -> Sort:
    if len(form) != 3:
        raise _fail("expected (sort name kind)", form)
    name = _ident(form.items[1], "sort name")
    kind = form.items[2]
    if isinstance(kind, Atom):
        if kind.text == "symmetric":
            return Sort(name, SortKind.SYMMETRIC, line=form.line)
        raise _fail(f"unknown sort kind {kind.text!r}", kind)
    spec = _form(kind)
    if spec.head() == "ordered":
        if len(spec) != 2:
            raise _fail("expected (ordered minimum)", spec)
        return Sort(name, SortKind.ORDERED, minimum=_ident(spec.items[1], "minimum constant"), line=form.line)
    if spec.head() == "subsets-of":
        if len(spec) != 3:
            raise _fail("expected (subsets-of base policy)", spec)
        base = _ident(spec.items[1], "base sort")
        return Sort(name, SortKind.SUBSET, base=base, policy=_parse_policy(spec.items[2]), line=form.line)
    raise _fail(f"unknown sort kind {spec.head()!r}", spec)


def _parse_policy(node: SExpr) -> QuorumPolicy:
    if isinstance(node, Atom):
        if node.text == "majority":
            return QuorumPolicy(QuorumPolicyKind.MAJORITY)
        raise _fail(f"unknown subset policy {node.text!r}", node)
    form = _form(node)
    if form.head() == "size" and len(form) == 2:
        return QuorumPolicy(QuorumPolicyKind.SIZE, size=_int(form.items[1], "subset size"))
    if form.head() == "explicit":
        members = tuple(
            tuple(sorted(_int(index, "member index") for index in _form(group, minimum=0).items))
            for group in form.items[1:]
        )
        return QuorumPolicy(QuorumPolicyKind.EXPLICIT, members=members)
    raise _fail("expected majority, (size k) or (explicit (i ...) ...)", form)


def _parse_arguments(nodes: tuple[SExpr, ...]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    sorts: list[str] = []
    names: list[str] = []
    for node in nodes:
        if isinstance(node, Atom):
            sorts.append(_ident(node, "argument sort"))
        else:
            pair = _form(node, minimum=2)
            names.append(_ident(pair.items[0], "argument name"))
            sorts.append(_ident(pair.items[1], "argument sort"))
    if names and len(names) != len(sorts):
        raise _fail("name all arguments or none", nodes[0])
    return tuple(sorts), tuple(names)


def _parse_action(form: SList) -> Action:
    if len(form) < 3:
        raise _fail("expected (action name (params) clauses...)", form)
    name = _ident(form.items[1], "action name")
    reader = FormulaReader()
    params = reader.bindings(form.items[2])
    reader = FormulaReader({var.name: var for var in params})
    guard: Formula = TRUE
    updates: list[Update] = []
    for clause in form.items[3:]:
        part = _form(clause)
        head = part.head()
        if head == "guard":
            if len(part) != 2:
                raise _fail("expected (guard formula)", part)
            guard = reader.formula(part.items[1])
        elif head == "unchanged":
            updates.extend(Update(_ident(item, "symbol"), UpdateKind.UNCHANGED) for item in part.items[1:])
        elif head == "update":
            symbol = _ident(part.items[1], "symbol")
            points: list[PointUpdate] = []
            for entry in part.items[2:]:
                pair = _form(entry, minimum=2)
                if len(pair) != 2:
                    raise _fail("expected ((args...) value)", pair)
                args = tuple(reader.term(item) for item in _form(pair.items[0], minimum=0).items)
                points.append(PointUpdate(args, _value(reader, pair.items[1])))
            updates.append(Update(symbol, UpdateKind.POINTWISE, tuple(points)))
        else:
            raise _fail(f"unknown action clause {head!r}", part)
    return Action(name, params, guard, tuple(updates), line=form.line)


def _value(reader: FormulaReader, node: SExpr) -> Formula | Term:
    """Update values are formulas for relations and terms for functions."""

    if isinstance(node, Atom) and node.text in {"true", "false"}:
        return reader.formula(node)
    if isinstance(node, SList) and node.head() in _CONNECTIVES | _COMPARISONS | {"=", "!=", "member", "forall", "exists"}:
        return reader.formula(node)
    return reader.term(node)


def _relation_values(protocol: Protocol) -> Protocol:
    """Re-read relation update values parsed as terms (e.g. a bare predicate name) as formulas."""

    actions = []
    for action in protocol.actions:
        updates = []
        for update in action.updates:
            if protocol.has_symbol(update.symbol) and protocol.symbol(update.symbol).is_relation:
                points = tuple(
                    PointUpdate(point.args, _term_as_formula(point.value)) for point in update.points
                )
                updates.append(Update(update.symbol, update.kind, points))
            else:
                updates.append(update)
        actions.append(Action(action.name, action.params, action.guard, tuple(updates), line=action.line))
    return Protocol(
        protocol.name, protocol.sorts, protocol.symbols, protocol.definitions, protocol.axioms,
        tuple(actions), protocol.init, protocol.safety,
    )


def _term_as_formula(value: Formula | Term) -> Formula:
    if isinstance(value, App):
        return Pred(value.symbol, value.args)
    return value  # type: ignore[return-value]


def parse_protocol(text: str, *, check: bool = True) -> Protocol:
    """Parse one `(protocol ...)` form; raises ValidationError when `check` finds diagnostics."""

    root = _form(read_one(text), "protocol", minimum=2)
    name = _ident(root.items[1], "protocol name")
    sorts: list[Sort] = []
    symbols: list[Symbol] = []
    definitions: list[Definition] = []
    axioms: list[Axiom] = []
    actions: list[Action] = []
    init: Formula | None = None
    safety: Formula | None = None
    for node in root.items[2:]:
        form = _form(node)
        head = form.head()
        if head == "sort":
            sorts.append(_parse_sort(form))
        elif head == "constant":
            if len(form) != 3:
                raise _fail("expected (constant name sort)", form)
            symbols.append(Symbol(
                _ident(form.items[1], "constant"), (), _ident(form.items[2], "sort"), SymbolRole.RIGID,
                line=form.line,
            ))
        elif head == "relation":
            arg_sorts, arg_names = _parse_arguments(form.items[2:])
            symbols.append(Symbol(
                _ident(form.items[1], "relation name"), arg_sorts, BOOL, SymbolRole.STATE, arg_names,
                line=form.line,
            ))
        elif head == "function":
            if len(form) != 4:
                raise _fail("expected (function name (args) result)", form)
            arg_sorts, arg_names = _parse_arguments(_form(form.items[2], minimum=0).items)
            symbols.append(Symbol(
                _ident(form.items[1], "function name"), arg_sorts, _ident(form.items[3], "result sort"),
                SymbolRole.STATE, arg_names, line=form.line,
            ))
        elif head == "definition":
            if len(form) != 4:
                raise _fail("expected (definition name (params) body)", form)
            params = FormulaReader().bindings(form.items[2])
            body = FormulaReader({var.name: var for var in params}).formula(form.items[3])
            definition_name = _ident(form.items[1], "definition name")
            definitions.append(Definition(definition_name, params, body, line=form.line))
            symbols.append(Symbol(
                definition_name, tuple(var.sort for var in params), BOOL, SymbolRole.DEFINITION,
                tuple(var.name for var in params), line=form.line,
            ))
        elif head == "axiom":
            if len(form) != 3:
                raise _fail("expected (axiom name formula)", form)
            axioms.append(Axiom(_ident(form.items[1], "axiom name"), FormulaReader().formula(form.items[2]), form.line))
        elif head == "action":
            actions.append(_parse_action(form))
        elif head in {"init", "safety"}:
            if len(form) != 2:
                raise _fail(f"expected ({head} formula)", form)
            if head == "init":
                init = FormulaReader().formula(form.items[1])
            else:
                safety = FormulaReader().formula(form.items[1])
        else:
            raise _fail(f"unknown protocol clause {head!r}", form)
    if init is None or safety is None:
        raise _fail("protocol needs both (init ...) and (safety ...)", root)
    protocol = _relation_values(Protocol(
        name=name,
        sorts=tuple(sorts),
        symbols=tuple(symbols),
        definitions=tuple(definitions),
        axioms=tuple(axioms),
        actions=tuple(actions),
        init=init,
        safety=safety,
    ))
    if check:
        issues = validate(protocol)
        if issues:
            raise ValidationError(issues)
    return protocol


# Assertions


def parse_assertions(text: str, protocol: Protocol) -> AssertionFile:
    forms = read_all(text)
    if not forms:
        return AssertionFile(protocol.name)
    if len(forms) != 1:
        raise _fail("expected a single (assertions ...) form", forms[1])
    root = _form(forms[0], "assertions", minimum=2)
    owner = _ident(root.items[1], "protocol name")
    if owner != protocol.name:
        raise _fail(f"assertions are for {owner}, not {protocol.name}", root)
    parsed = []
    seen: set[str] = set()
    for node in root.items[2:]:
        form = _form(node, "assert")
        if len(form) != 3:
            raise _fail("expected (assert name formula)", form)
        name = _ident(form.items[1], "assertion name")
        if name in seen:
            raise _fail(f"duplicate assertion {name}", form)
        seen.add(name)
        formula = FormulaReader().formula(form.items[2])
        issues = check_formula(formula, protocol, line=form.line, where=name)
        if issues:
            first = issues[0]
            raise ParseError(first.message, first.line, first.column)
        parsed.append(from_formula(name, formula))
    return AssertionFile(protocol.name, tuple(parsed))


# Mappings


def parse_mapping(text: str) -> RefinementMapping:
    root = _form(read_one(text), "mapping", minimum=3)
    low = _ident(_form(root.items[1], "from", minimum=2).items[1], "low-level protocol")
    high = _ident(_form(root.items[2], "to", minimum=2).items[1], "high-level protocol")
    entries: list[SymbolMap] = []
    for node in root.items[3:]:
        form = _form(node, "map", minimum=3)
        extra = 0
        for option in form.items[3:]:
            spec = _form(option, "extra", minimum=2)
            if _ident(spec.items[1], "quantifier") != "forall":
                raise _fail("added arguments can only be universally quantified", spec)
            extra = _int(spec.items[2], "argument count") if len(spec) > 2 else 1
        entries.append(SymbolMap(_ident(form.items[1], "high symbol"), _ident(form.items[2], "low symbol"), extra))
    return RefinementMapping(low=low, high=high, symbols=tuple(entries), line=root.line)


# Hierarchies


def parse_hierarchy(text: str, base: Path | None = None) -> HierarchyConfig:
    root = _form(read_one(text), "hierarchy", minimum=2)
    name = _ident(root.items[1], "hierarchy name")
    folder = base or Path(".")
    levels: list[HierarchyLevel] = []
    for node in root.items[2:]:
        form = _form(node, "level", minimum=3)
        level_name = _ident(form.items[1], "level name")
        protocol_path: Path | None = None
        mapping_path: Path | None = None
        reference_path: Path | None = None
        sizes: dict[str, int] = {}
        for option in form.items[2:]:
            part = _form(option, minimum=2)
            head = part.head()
            if head == "protocol":
                protocol_path = folder / _string(part.items[1], "protocol path")
            elif head == "mapping":
                mapping_path = folder / _string(part.items[1], "mapping path")
            elif head == "reference":
                reference_path = folder / _string(part.items[1], "reference assertions path")
            elif head == "size":
                values = part.items[1:]
                if len(values) % 2:
                    raise _fail("expected (size sort n sort n ...)", part)
                for index in range(0, len(values), 2):
                    sizes[_ident(values[index], "sort")] = _int(values[index + 1], "size")
            else:
                raise _fail(f"unknown level option {head!r}", part)
        if protocol_path is None:
            raise _fail(f"level {level_name} names no protocol", form)
        if levels and mapping_path is None:
            raise _fail(f"level {level_name} needs a mapping to {levels[-1].name}", form)
        levels.append(HierarchyLevel(level_name, protocol_path, sizes, mapping_path, reference_path))
    if not levels:
        raise _fail("hierarchy has no levels", root)
    return HierarchyConfig(name, tuple(levels), base)


__all__ = [
    "FormulaReader",
    "parse_assertions",
    "parse_formula",
    "parse_hierarchy",
    "parse_mapping",
    "parse_protocol",
]
