"""Range boosting over ordered sorts.

A clause over k ordered constants has one ordering-compliant variant per
strictly increasing k-tuple of the sort. Each variant is checked against the
frame; the safe ones are summarised by an interval antecedent over k
universal variables when such a conjunction describes them exactly.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from ..grounding.clauses import Clause
from ..ir import Cmp, DomainConst, Formula, Term, Var, conjoin, replace_constants
from .assertions import Boosted, QuantifiedAssertion, mentions_constants, variable_prefixes
from .symmetry import Permutation, expansion_matches, permute_clause

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance
    from ..solver.session import SolverSession

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    UNKNOWN = "unknown"
    PENDING = "pending"


Oracle = Callable[[frozenset[Clause]], Verdict]


@dataclass(frozen=True)
class Variant:
    values: tuple[int, ...]
    clause: Clause
    verdict: Verdict = Verdict.PENDING


@dataclass(frozen=True)
class OrderedVariantSet:
    """Ordering-compliant variants of `base` over one ordered sort."""

    base: Clause
    sort: str
    size: int
    base_values: tuple[int, ...]
    variants: tuple[Variant, ...]

    @property
    def k(self) -> int:
        return len(self.base_values)

    def safe(self) -> set[tuple[int, ...]]:
        return {item.values for item in self.variants if item.verdict is Verdict.SAFE}

    def with_verdicts(self, verdicts: dict[tuple[int, ...], Verdict]) -> "OrderedVariantSet":
        return replace(
            self,
            variants=tuple(replace(item, verdict=verdicts.get(item.values, item.verdict)) for item in self.variants),
        )

    def table(self, instance: "FiniteInstance") -> list[dict[str, object]]:
        names = instance.domain(self.sort).constants
        return [
            {"values": [names[index].name for index in item.values], "verdict": item.verdict.value}
            for item in self.variants
        ]


def ordered_constants(instance: "FiniteInstance", clause: Clause, sort: str) -> tuple[int, ...]:
    """Indices of the `sort` constants in `clause`, ascending."""

    found: set[int] = set()
    for item in clause.literals:
        info = instance.atom(item.key)
        found.update(arg.index for arg in info.args if arg.sort == sort)
        if info.sort == sort and not isinstance(item.value, bool):
            found.add(item.value)
    return tuple(sorted(found))


def relabel(instance: "FiniteInstance", sort: str, source: Sequence[int], target: Sequence[int]) -> Permutation:
    """Positional replacement of `source` constants by `target` ones; other elements stay put."""

    image = list(range(instance.domain(sort).size))
    for old, new in zip(source, target):
        image[old] = new
    return Permutation(((sort, tuple(image)),))


def ordered_variants(instance: "FiniteInstance", clause: Clause, sort: str) -> Optional[OrderedVariantSet]:
    base_values = ordered_constants(instance, clause, sort)
    if not base_values:
        return None
    size = instance.domain(sort).size
    variants = []
    for values in itertools.combinations(range(size), len(base_values)):
        mapped = permute_clause(instance, clause, relabel(instance, sort, base_values, values))
        assert mapped is not None
        verdict = Verdict.SAFE if values == base_values else Verdict.PENDING
        variants.append(Variant(values, mapped, verdict))
    return OrderedVariantSet(clause, sort, size, base_values, tuple(variants))


def safe_subset(vs: OrderedVariantSet, check: Callable[[Variant], Verdict], *, retry: bool = False) -> OrderedVariantSet:
    """Fill in verdicts for pending variants (and unknown ones when `retry`)."""

    todo = {Verdict.PENDING, Verdict.UNKNOWN} if retry else {Verdict.PENDING}
    verdicts = {item.values: check(item) for item in vs.variants if item.verdict in todo}
    return vs.with_verdicts(verdicts)


@dataclass(frozen=True)
class RangeBounds:
    """Strict per-position bounds on an increasing tuple; None means unbounded."""

    lower: tuple[Optional[int], ...]
    upper: tuple[Optional[int], ...]

    def admits(self, values: Sequence[int]) -> bool:
        if any(left >= right for left, right in zip(values, values[1:])):
            return False
        for value, low, high in zip(values, self.lower, self.upper):
            if low is not None and not low < value:
                return False
            if high is not None and not value < high:
                return False
        return True

    @property
    def atoms(self) -> int:
        return sum(item is not None for item in (*self.lower, *self.upper))

    def formula(self, variables: Sequence[Var], constant: Callable[[int], Term]) -> Formula:
        parts: list[Formula] = []
        for position, var in enumerate(variables):
            low, high = self.lower[position], self.upper[position]
            if low is not None:
                parts.append(Cmp("<", constant(low), var))
            if high is not None:
                parts.append(Cmp("<", var, constant(high)))
            if position + 1 < len(variables):
                parts.append(Cmp("<", var, variables[position + 1]))
        return conjoin(parts)


def synthesize_antecedent(safe: set[tuple[int, ...]], size: int, k: int) -> Optional[RangeBounds]:
    """Shortest set of interval bounds admitting exactly `safe` among increasing k-tuples.

    Ties go to the first candidate in position order, lower bound before upper.
    """

    if not safe:
        return None
    universe = list(itertools.combinations(range(size), k))
    candidates: list[tuple[int, str, int]] = []
    for position in range(k):
        low = min(values[position] for values in safe)
        high = max(values[position] for values in safe)
        if low > position:
            candidates.append((position, "lower", low - 1))
        if high < size - k + position:
            candidates.append((position, "upper", high + 1))
    for count in range(len(candidates) + 1):
        for chosen in itertools.combinations(candidates, count):
            lower: list[Optional[int]] = [None] * k
            upper: list[Optional[int]] = [None] * k
            for position, side, value in chosen:
                (lower if side == "lower" else upper)[position] = value
            bounds = RangeBounds(tuple(lower), tuple(upper))
            if all(bounds.admits(values) == (values in safe) for values in universe):
                return bounds
    return None


def _fresh_variables(assertion: QuantifiedAssertion, prefix: str, sort: str, k: int) -> list[Var]:
    taken = {var.name for _, var in assertion.prefix}
    found: list[Var] = []
    counter = 1
    while len(found) < k:
        name = f"{prefix}{counter}"
        counter += 1
        if name not in taken:
            found.append(Var(name, sort))
    return found


def _mapped(instance: "FiniteInstance", boosted: Boosted, perm: Permutation) -> Boosted:
    clauses = frozenset(permute_clause(instance, item, perm) for item in boosted.clauses)
    representative = permute_clause(instance, boosted.representative, perm)
    assert representative is not None and None not in clauses
    return Boosted(boosted.assertion, clauses, representative)  # type: ignore[arg-type]


def boost_range(
    instance: "FiniteInstance",
    boosted: Boosted,
    sort: str,
    oracle: Oracle,
    *,
    session: Optional["SolverSession"] = None,
) -> list[Boosted]:
    """Widen `boosted` over the ordered `sort`.

    Returns one quantified piece when the safe variants have an interval
    description, otherwise one piece per safe variant.
    """

    vs = ordered_variants(instance, boosted.representative, sort)
    if vs is None:
        return [boosted]
    constants = instance.domain(sort).constants
    pieces: dict[tuple[int, ...], Boosted] = {}

    def check(variant: Variant) -> Verdict:
        piece = pieces.get(variant.values)
        if piece is None:
            piece = _mapped(instance, boosted, relabel(instance, sort, vs.base_values, variant.values))
            pieces[variant.values] = piece
        return oracle(piece.clauses)

    vs = safe_subset(vs, check)
    bounds = synthesize_antecedent(vs.safe(), vs.size, vs.k)
    if bounds is None and any(item.verdict is Verdict.UNKNOWN for item in vs.variants):
        vs = safe_subset(vs, check, retry=True)
        bounds = synthesize_antecedent(vs.safe(), vs.size, vs.k)
    logger.debug("range variants over %s: %s", sort, json.dumps(vs.table(instance)))

    base = boosted.assertion
    originals = [constants[index] for index in vs.base_values]
    safe = sorted(vs.safe())
    pieces[vs.base_values] = boosted
    if bounds is not None:
        prefix = variable_prefixes(instance.protocol)[sort]
        variables = _fresh_variables(base, prefix, sort, vs.k)
        matrix = replace_constants(base.matrix, dict(zip(originals, variables)))
        antecedent = conjoin([base.antecedent, bounds.formula(variables, lambda index: constants[index])])
        universals = [("forall", var) for var in base.universals] + [("forall", var) for var in variables]
        existentials = [("exists", var) for var in base.existentials]
        assertion = QuantifiedAssertion(
            base.name,
            tuple(universals + existentials),
            antecedent,
            matrix,
            ground=mentions_constants(matrix) or mentions_constants(antecedent),
        )
        clauses = frozenset().union(*(pieces[values].clauses for values in safe))
        candidate = Boosted(assertion, clauses, boosted.representative)
        if expansion_matches(instance, assertion, clauses, session):
            return [candidate]
        logger.info("range assertion over %s failed its expansion check", sort)
    else:
        logger.info("no interval describes the %d safe variants over %s", len(safe), sort)
    fallback: list[Boosted] = []
    for values in safe:
        piece = pieces[values]
        mapping: dict[DomainConst, Term] = {old: constants[new] for old, new in zip(originals, values)}
        matrix = replace_constants(base.matrix, mapping)
        fallback.append(Boosted(replace(base, matrix=matrix, ground=True), piece.clauses, piece.representative))
    return fallback


__all__ = [
    "Oracle",
    "OrderedVariantSet",
    "RangeBounds",
    "Variant",
    "Verdict",
    "boost_range",
    "ordered_constants",
    "ordered_variants",
    "relabel",
    "safe_subset",
    "synthesize_antecedent",
]
