"""Quantified assertions: prefix, rigid antecedent and matrix."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable, Iterable

from ..grounding.clauses import Clause, Literal
from ..ir import (
    TRUE,
    App,
    DomainConst,
    Eq,
    Formula,
    Implies,
    Not,
    Pred,
    Quant,
    Term,
    Var,
    conjoin,
    disjoin,
    free_vars,
    is_closed,
    map_terms,
)
from ..ir.formulas import atom_terms, walk, walk_terms

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance
    from ..ir import Protocol

TermMap = Callable[[DomainConst], Term]


@dataclass(frozen=True)
class QuantifiedAssertion:
    """`forall U. antecedent -> exists E. matrix`.

    Universal variables come first in `prefix`; existential ones (if any) follow and
    their guards live inside the matrix. `ground` marks instance-specific fallbacks
    whose matrix still names instance constants.
    """

    name: str
    prefix: tuple[tuple[str, Var], ...]
    antecedent: Formula
    matrix: Formula
    ground: bool = False

    @property
    def universals(self) -> tuple[Var, ...]:
        return tuple(var for kind, var in self.prefix if kind == "forall")

    @property
    def existentials(self) -> tuple[Var, ...]:
        return tuple(var for kind, var in self.prefix if kind == "exists")

    def formula(self) -> Formula:
        body = self.matrix
        if self.existentials:
            body = Quant("exists", self.existentials, body)
        if self.antecedent != TRUE:
            body = Implies(self.antecedent, body)
        if self.universals:
            body = Quant("forall", self.universals, body)
        return body

    def renamed(self, name: str) -> "QuantifiedAssertion":
        return replace(self, name=name)

    @property
    def is_closed(self) -> bool:
        return is_closed(self.formula())


def from_formula(name: str, f: Formula) -> QuantifiedAssertion:
    """Split a closed formula's outer universal block off as the prefix."""

    if isinstance(f, Quant) and f.is_forall:
        return QuantifiedAssertion(name, tuple(("forall", var) for var in f.vars), TRUE, f.body)
    return QuantifiedAssertion(name, (), TRUE, f)


def variables_by_sort(assertion: QuantifiedAssertion) -> dict[str, list[Var]]:
    grouped: dict[str, list[Var]] = {}
    for _, var in assertion.prefix:
        grouped.setdefault(var.sort, []).append(var)
    return grouped


def unbound(assertion: QuantifiedAssertion) -> set[Var]:
    return free_vars(assertion.formula())


@dataclass(frozen=True)
class Boosted:
    """An assertion together with the ground clauses it stands for at the instance size."""

    assertion: QuantifiedAssertion
    clauses: frozenset[Clause]
    representative: Clause


def variable_prefixes(protocol: "Protocol") -> dict[str, str]:
    """Upper-case sort initials for generated variables; clashes fall back to the sort name."""

    taken: set[str] = set()
    found: dict[str, str] = {}
    for sort in protocol.sorts:
        prefix = sort.name[0].upper()
        if prefix in taken:
            prefix = sort.name.capitalize()
        taken.add(prefix)
        found[sort.name] = prefix
    return found


def _keep(constant: DomainConst) -> Term:
    return constant


def literal_formula(instance: "FiniteInstance", literal: Literal, term: TermMap = _keep) -> Formula:
    info = instance.atom(literal.key)
    args = tuple(term(arg) for arg in info.args)
    if isinstance(literal.value, bool):
        atom: Formula = Pred(info.symbol, args)
        return atom if literal.value else Not(atom)
    value = instance.domain(info.sort or "").constants[literal.value]
    eq = Eq(App(info.symbol, args), term(value))
    return eq if literal.positive else Not(eq)


def clause_formula(instance: "FiniteInstance", clause: Clause, term: TermMap = _keep) -> Formula:
    return disjoin([literal_formula(instance, item, term) for item in clause.literals])


def with_pinned_names(instance: "FiniteInstance", f: Formula) -> Formula:
    """Replace pinned instance constants by the rigid constant that names them."""

    def rename(t: Term) -> Term:
        if isinstance(t, DomainConst):
            name = instance.pinned_name(t)
            if name is not None:
                return App(name, ())
        return t

    return map_terms(f, rename)


def mentions_constants(f: Formula) -> bool:
    return any(
        isinstance(t, DomainConst) for node in walk(f) for top in atom_terms(node) for t in walk_terms(top)
    )


def ground_assertion(name: str, instance: "FiniteInstance", clauses: Iterable[Clause]) -> QuantifiedAssertion:
    """The conjunction of `clauses` as an assertion without quantifiers."""

    matrix = with_pinned_names(instance, conjoin([clause_formula(instance, item) for item in clauses]))
    return QuantifiedAssertion(name, (), TRUE, matrix, ground=mentions_constants(matrix))


__all__ = [
    "Boosted",
    "QuantifiedAssertion",
    "clause_formula",
    "from_formula",
    "ground_assertion",
    "literal_formula",
    "mentions_constants",
    "unbound",
    "variable_prefixes",
    "variables_by_sort",
    "with_pinned_names",
]
