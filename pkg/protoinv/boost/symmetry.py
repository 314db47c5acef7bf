"""Symmetry boosting: orbits of learned clauses under element renaming, and their quantified form."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

from ..errors import SolverTimeoutError
from ..grounding.clauses import Clause, Literal
from ..grounding.ground import atom_key
from ..ir import App, DomainConst, Eq, Formula, Member, Not, Term, Var, conjoin
from ..solver.queries import check_sat
from .assertions import QuantifiedAssertion, clause_formula, mentions_constants, variable_prefixes

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance
    from ..solver.session import SolverSession

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """A renaming of symmetric elements together with its induced action on subset sorts.

    `images` maps a sort to the image index of each element; unlisted sorts are
    fixed. A subset sort mapped to None has no image inside its member table.
    """

    images: tuple[tuple[str, Optional[tuple[int, ...]]], ...]

    @cached_property
    def table(self) -> dict[str, Optional[tuple[int, ...]]]:
        return dict(self.images)

    def image(self, sort: str, index: int) -> Optional[int]:
        if sort not in self.table:
            return index
        mapped = self.table[sort]
        return None if mapped is None else mapped[index]

    @property
    def complete(self) -> bool:
        return all(mapped is not None for _, mapped in self.images)


def induced(instance: "FiniteInstance", subset_sort: str, image: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Each subset goes to the table entry holding the images of its members."""

    domain = instance.domain(subset_sort)
    lookup = {members: index for index, members in enumerate(domain.members)}
    mapped: list[int] = []
    for members in domain.members:
        target = lookup.get(frozenset(image[i] for i in members))
        if target is None:
            return None
        mapped.append(target)
    return tuple(mapped)


def permutation(instance: "FiniteInstance", sort: str, image: Sequence[int]) -> Permutation:
    images: dict[str, Optional[tuple[int, ...]]] = {sort: tuple(image)}
    for other in instance.protocol.sorts:
        if other.is_subset and other.base == sort:
            images[other.name] = induced(instance, other.name, image)
    return Permutation(tuple(images.items()))


def free_elements(instance: "FiniteInstance", sort: str) -> list[int]:
    pinned = {item.index for item in instance.pinned(sort)}
    return [index for index in range(instance.domain(sort).size) if index not in pinned]


def generators(instance: "FiniteInstance") -> list[Permutation]:
    """Adjacent transpositions of the unpinned elements of every symmetric sort."""

    found: list[Permutation] = []
    for sort in instance.protocol.sorts:
        if not sort.is_symmetric:
            continue
        size = instance.domain(sort.name).size
        free = free_elements(instance, sort.name)
        for left, right in zip(free, free[1:]):
            image = list(range(size))
            image[left], image[right] = right, left
            found.append(permutation(instance, sort.name, image))
    return found


def group_order(instance: "FiniteInstance") -> int:
    order = 1
    for sort in instance.protocol.sorts:
        if sort.is_symmetric:
            order *= math.factorial(len(free_elements(instance, sort.name)))
    return order


def permute_literal(instance: "FiniteInstance", literal: Literal, perm: Permutation) -> Optional[Literal]:
    info = instance.atom(literal.key)
    args: list[DomainConst] = []
    for arg in info.args:
        index = perm.image(arg.sort, arg.index)
        if index is None:
            return None
        args.append(instance.domain(arg.sort).constants[index])
    value = literal.value
    if not isinstance(value, bool):
        index = perm.image(info.sort or "", value)
        if index is None:
            return None
        value = index
    key = atom_key(info.symbol, args)
    return Literal(instance.atom(key).position, key, value, literal.positive)


def permute_clause(instance: "FiniteInstance", clause: Clause, perm: Permutation) -> Optional[Clause]:
    literals = []
    for item in clause.literals:
        mapped = permute_literal(instance, item, perm)
        if mapped is None:
            return None
        literals.append(mapped)
    return Clause.of(literals)


def orbit(
    instance: "FiniteInstance",
    clause: Clause,
    gens: Optional[Sequence[Permutation]] = None,
) -> Optional[frozenset[Clause]]:
    """Closure of `{clause}` under the generators; None when some image leaves a subset table."""

    gens = generators(instance) if gens is None else gens
    seen = {clause}
    queue = deque([clause])
    while queue:
        current = queue.popleft()
        for perm in gens:
            image = permute_clause(instance, current, perm)
            if image is None:
                logger.debug("symmetry declined: %s has no image under a generator", current.render(instance))
                return None
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return frozenset(seen)


def _moved(instance: "FiniteInstance", clause: Clause) -> list[DomainConst]:
    """Unpinned symmetric and subset constants of `clause`, in first-appearance order."""

    found: dict[DomainConst, None] = {}
    pinned = set(instance.pins.values())

    def note(constant: DomainConst) -> None:
        sort = instance.domain(constant.sort).sort
        if (sort.is_symmetric or sort.is_subset) and constant not in pinned:
            found.setdefault(constant, None)

    for item in clause.literals:
        info = instance.atom(item.key)
        for arg in info.args:
            note(arg)
        if not isinstance(item.value, bool):
            note(instance.domain(info.sort or "").constants[item.value])
    return list(found)


class _Shape:
    """Variables for the moved constants of one clause and the rigid facts relating them."""

    def __init__(self, instance: "FiniteInstance", clause: Clause) -> None:
        self.instance = instance
        self.clause = clause
        prefixes = variable_prefixes(instance.protocol)
        counters: dict[str, int] = {}
        self.variables: dict[DomainConst, Var] = {}
        for constant in _moved(instance, clause):
            count = counters.get(constant.sort, 0) + 1
            counters[constant.sort] = count
            self.variables[constant] = Var(f"{prefixes[constant.sort]}{count}", constant.sort)

    def term(self, constant: DomainConst) -> Term:
        var = self.variables.get(constant)
        if var is not None:
            return var
        sort = self.instance.domain(constant.sort).sort
        if sort.is_symmetric:
            name = self.instance.pinned_name(constant)
            if name is not None:
                return App(name, ())
        return constant

    def of_sort(self, sort: str) -> list[Var]:
        return [var for var in self.variables.values() if var.sort == sort]

    @property
    def ordered_vars(self) -> list[Var]:
        order = {sort.name: position for position, sort in enumerate(self.instance.protocol.sorts)}
        return sorted(self.variables.values(), key=lambda var: order[var.sort])

    def guards(self) -> list[tuple[frozenset[Var], Formula]]:
        """Distinctness, pin exclusion and membership facts, each tagged with the variables it uses."""

        instance = self.instance
        facts: list[tuple[frozenset[Var], Formula]] = []
        for sort in instance.protocol.sorts:
            variables = self.of_sort(sort.name)
            for i, left in enumerate(variables):
                for right in variables[i + 1:]:
                    facts.append((frozenset((left, right)), Not(Eq(left, right))))
            if sort.is_symmetric:
                for var in variables:
                    for pinned in instance.pinned(sort.name):
                        facts.append((frozenset((var,)), Not(Eq(var, self.term(pinned)))))
        for constant, var in self.variables.items():
            sort = instance.domain(constant.sort).sort
            if not sort.is_subset:
                continue
            base = sort.base or ""
            elements = [(element, self.variables[element]) for element in self.variables if element.sort == base]
            elements += [(pinned, None) for pinned in instance.pinned(base)]
            for element, element_var in elements:
                inside: Formula = Member(element_var or self.term(element), var)
                if not instance.member(element, constant):
                    inside = Not(inside)
                used = frozenset((var,)) if element_var is None else frozenset((var, element_var))
                facts.append((used, inside))
        return facts

    def matrix(self) -> Formula:
        return clause_formula(self.instance, self.clause, self.term)

    def assertion(self, name: str, existential: Optional[Var] = None) -> QuantifiedAssertion:
        variables = self.ordered_vars
        guards = self.guards()
        outer = [fact for used, fact in guards if existential is None or existential not in used]
        inner = [fact for used, fact in guards if existential is not None and existential in used]
        prefix = [("forall", var) for var in variables if var != existential]
        matrix = self.matrix()
        if existential is not None:
            prefix.append(("exists", existential))
            matrix = conjoin([*inner, matrix])
        return QuantifiedAssertion(name, tuple(prefix), conjoin(outer), matrix, ground=mentions_constants(matrix))


def expansion_matches(
    instance: "FiniteInstance",
    assertion: QuantifiedAssertion,
    clauses: Iterable[Clause],
    session: Optional["SolverSession"] = None,
) -> bool:
    """Whether `assertion` grounds to the conjunction of `clauses`.

    Node identity settles most cases; otherwise the session decides equivalence.
    """

    b = instance.builder
    expanded = instance.expand(assertion.formula())
    expected = b.conj(item.node(b) for item in clauses)
    if expanded is expected:
        return True
    if session is None:
        return False
    try:
        return check_sat(session, [b.neg(b.iff(expanded, expected))]).unsat
    except SolverTimeoutError:
        logger.warning("expansion check for %s timed out", assertion.name or "assertion")
        return False


def infer_quantified(
    instance: "FiniteInstance",
    clause: Clause,
    clauses: Iterable[Clause],
    *,
    name: str = "",
    session: Optional["SolverSession"] = None,
) -> Optional[QuantifiedAssertion]:
    """One assertion equivalent to `clauses` (the orbit of `clause`), or None.

    Every moved constant becomes a universal variable under pairwise
    distinctness; when a sort's unpinned elements are all mentioned, its last
    variable is tried as an existential. Each candidate must pass
    `expansion_matches` before it is returned.
    """

    members = frozenset(clauses)
    shape = _Shape(instance, clause)
    candidate = shape.assertion(name)
    if expansion_matches(instance, candidate, members, session):
        return candidate
    for sort in instance.protocol.sorts:
        if not sort.is_symmetric:
            continue
        variables = shape.of_sort(sort.name)
        if not variables or len(variables) != len(free_elements(instance, sort.name)):
            continue
        candidate = shape.assertion(name, existential=variables[-1])
        if expansion_matches(instance, candidate, members, session):
            return candidate
    logger.info("no quantified form for %s; keeping %d ground clauses", clause.render(instance), len(members))
    return None


__all__ = [
    "Permutation",
    "expansion_matches",
    "free_elements",
    "generators",
    "group_order",
    "induced",
    "infer_quantified",
    "orbit",
    "permutation",
    "permute_clause",
    "permute_literal",
]
