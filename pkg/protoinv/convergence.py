"""Grow instance sizes until the inferred invariant stops depending on them.

Each round proves the protocol at the current sizes, then asks whether any
sort is too small for the number of its variables that are in scope at once.
A round that passes is re-certified one size up on every independent sort.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .boost.assertions import QuantifiedAssertion
from .certifier import check_inductive
from .config import RunConfig
from .engine.ic3 import property_node, prove
from .engine.results import Inconclusive, Outcome, Proof
from .grounding.instance import SizeAssignment, instantiate, subset_count
from .ir import Formula, Pred, Protocol, Quant
from .ir.formulas import children

logger = logging.getLogger(__name__)


# Saturation


def _scope_depth(protocol: Protocol, f: Formula, cache: dict[str, Counter[str]]) -> Counter[str]:
    """Most variables of each sort bound at one point, definitions inlined."""

    if isinstance(f, Quant):
        depth = _scope_depth(protocol, f.body, cache)
        for var in f.vars:
            depth[var.sort] += 1
        return depth
    if isinstance(f, Pred) and protocol.has_definition(f.symbol):
        if f.symbol not in cache:
            cache[f.symbol] = _scope_depth(protocol, protocol.definition(f.symbol).body, cache)
        return Counter(cache[f.symbol])
    found: Counter[str] = Counter()
    for child in children(f):
        found |= _scope_depth(protocol, child, cache)
    return found


def scope_counts(protocol: Protocol, formulas: Iterable[Formula]) -> dict[str, int]:
    cache: dict[str, Counter[str]] = {}
    found: Counter[str] = Counter()
    for f in formulas:
        found |= _scope_depth(protocol, f, cache)
    return {sort.name: found.get(sort.name, 0) for sort in protocol.sorts}


@dataclass(frozen=True)
class Saturation:
    counts: dict[str, int]
    grow: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.grow is None


def saturation_check(protocol: Protocol, formulas: Iterable[Formula], sizes: SizeAssignment) -> Saturation:
    """`grow` names the first sort (declaration order) that is too small for its variables.

    A sort's count is the largest number of its variables simultaneously in
    scope in any one formula after definitions are inlined, not the number of
    distinct variables across an assertion. Symmetric sorts may be filled
    exactly (count <= size); ordered sorts keep one element spare
    (count < size). A subset sort that is too small grows through its base sort.
    """

    counts = scope_counts(protocol, formulas)
    values = sizes.as_dict()
    for sort in protocol.sorts:
        count = counts[sort.name]
        if sort.is_subset:
            base = protocol.sort(sort.base or "")
            if count > subset_count(values[base.name], sort):
                return Saturation(counts, base.name)
        elif sort.is_ordered:
            if count >= values[sort.name]:
                return Saturation(counts, sort.name)
        elif count > values[sort.name]:
            return Saturation(counts, sort.name)
    return Saturation(counts)


# Convergence loop


@dataclass(frozen=True)
class Iteration:
    sizes: SizeAssignment
    outcome: str
    counts: dict[str, int] = field(default_factory=dict)
    grow: Optional[str] = None
    gate: Optional[str] = None
    statistics: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "sizes": self.sizes.as_dict(),
            "outcome": self.outcome,
            "variables_in_scope": dict(self.counts),
            "grow": self.grow,
            "gate": self.gate,
            "statistics": dict(self.statistics),
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Status is one of converged, instance_only, counterexample, inconclusive.

    `instance_only` passed the gate but still holds ground assertions; it does
    not count as converged.
    """

    protocol: str
    base: SizeAssignment
    sizes: SizeAssignment
    status: str
    iterations: tuple[Iteration, ...]
    outcome: Outcome
    strengthening: tuple[QuantifiedAssertion, ...] = ()
    reason: str = ""

    @property
    def proof(self) -> Optional[Proof]:
        return self.outcome if isinstance(self.outcome, Proof) else None

    @property
    def assertions(self) -> tuple[QuantifiedAssertion, ...]:
        proof = self.proof
        return proof.assertions if proof is not None else ()

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def growth(self) -> dict[str, str]:
        """`sort: "x ↦ y"` for every sort, as in a cutoff table."""

        base = self.base.as_dict()
        final = self.sizes.as_dict()
        return {
            sort: str(final[sort]) if base[sort] == final[sort] else f"{base[sort]} ↦ {final[sort]}"
            for sort in final
        }

    def queries(self) -> int:
        return sum(int(item.statistics.get("queries", 0)) for item in self.iterations)

    def seconds(self) -> float:
        return round(sum(float(item.statistics.get("seconds", 0.0)) for item in self.iterations), 3)

    def as_dict(self) -> dict[str, Any]:
        return {
            "protocol": self.protocol,
            "status": self.status,
            "reason": self.reason,
            "base_sizes": self.base.as_dict(),
            "final_sizes": self.sizes.as_dict(),
            "growth": self.growth(),
            "assertions": len(self.assertions),
            "strengthening": len(self.strengthening),
            "queries": self.queries(),
            "seconds": self.seconds(),
            "iterations": [item.as_dict() for item in self.iterations],
        }

    def render(self) -> str:
        growth = ", ".join(f"{sort} = {value}" for sort, value in self.growth().items())
        return f"{self.protocol}: {self.status} ({growth}), {len(self.assertions)} assertions, {self.queries()} queries"


def independent_sizes(protocol: Protocol, sizes: SizeAssignment) -> SizeAssignment:
    """Drop derived subset sorts; they follow their base sort as it grows."""

    derived = {sort.name for sort in protocol.sorts if sort.is_subset}
    return SizeAssignment(tuple((sort, size) for sort, size in sizes.items if sort not in derived))


def _formulas(protocol: Protocol, strengthening: Sequence[QuantifiedAssertion], proof: Proof) -> list[Formula]:
    return [protocol.safety, *(item.formula() for item in strengthening), *(item.formula() for item in proof.assertions)]


def semantic_gate(
    protocol: Protocol,
    sizes: SizeAssignment,
    strengthening: Sequence[QuantifiedAssertion],
    assertions: Sequence[QuantifiedAssertion],
    config: RunConfig,
) -> Optional[str]:
    """None when the invariant stays inductive with every independent sort one larger.

    On failure the first sort whose single increment already breaks the
    invariant is returned; if none does alone, the first sort.
    """

    names = [sort for sort, _ in sizes.items]

    def holds(bigger: SizeAssignment) -> bool:
        instance = instantiate(protocol, bigger)
        prop = property_node(instance, strengthening)
        return check_inductive(instance, prop, assertions, config=config.solver).passed

    if holds(sizes.bumped(names)):
        return None
    for sort in names:
        if not holds(sizes.bumped([sort])):
            return sort
    return names[0]


def converge(
    protocol: Protocol,
    base: SizeAssignment,
    *,
    strengthening: Sequence[QuantifiedAssertion] = (),
    config: RunConfig | None = None,
) -> ConvergenceReport:
    """Prove, check saturation, grow one sort by one, repeat."""

    config = config or RunConfig()
    strengthening = tuple(strengthening)
    base = independent_sizes(protocol, base)
    ceilings = config.convergence.max_size
    sizes = base
    iterations: list[Iteration] = []

    def report(status: str, outcome: Outcome, reason: str = "") -> ConvergenceReport:
        logger.info("%s finished as %s at %s%s", protocol.name, status, sizes, f": {reason}" if reason else "")
        return ConvergenceReport(protocol.name, base, sizes, status, tuple(iterations), outcome, strengthening, reason)

    while True:
        instance = instantiate(protocol, sizes)
        outcome = prove(instance, config, strengthening=strengthening)
        statistics = dict(outcome.statistics)
        if not isinstance(outcome, Proof):
            iterations.append(Iteration(sizes, outcome.status, statistics=statistics))
            reason = outcome.reason if isinstance(outcome, Inconclusive) else ""
            return report(outcome.status, outcome, reason)
        saturation = saturation_check(protocol, _formulas(protocol, strengthening, outcome), sizes)
        grow, gate = saturation.grow, None
        if grow is None and config.convergence.semantic_gate:
            grow = semantic_gate(protocol, sizes, strengthening, outcome.assertions, config)
            gate = "passed" if grow is None else "failed"
        iterations.append(Iteration(sizes, outcome.status, saturation.counts, grow, gate, statistics))
        if grow is None:
            if any(item.ground for item in outcome.assertions):
                return report("instance_only", outcome, "some assertions still name instance constants")
            return report("converged", outcome)
        ceiling = ceilings.get(grow)
        if ceiling is not None and sizes[grow] + 1 > ceiling:
            return report("inconclusive", outcome, f"{grow} would grow past its ceiling of {ceiling}")
        logger.info("%s: growing %s from %d (variables in scope %s)", protocol.name, grow, sizes[grow], saturation.counts)
        sizes = sizes.bumped([grow])


__all__ = [
    "ConvergenceReport",
    "Iteration",
    "Saturation",
    "converge",
    "independent_sizes",
    "saturation_check",
    "scope_counts",
    "semantic_gate",
]
