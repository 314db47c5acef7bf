"""Hierarchical strengthening down a refinement chain.

The most abstract level is proved first. Every later level proves its own
Safety strengthened by all assertions of the level above, mapped through the
refinement mapping between the two; mapping level by level composes the
mappings of every level above.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Sequence

from .boost.assertions import QuantifiedAssertion, variable_prefixes
from .certifier import equivalent, invariant_node, minimize
from .config import RunConfig
from .convergence import ConvergenceReport, converge
from .errors import MappingError
from .frontend.documents import HierarchyConfig, HierarchyLevel, RefinementMapping, check_mapping
from .frontend.parser import parse_assertions, parse_mapping, parse_protocol
from .grounding.instance import SizeAssignment, instantiate
from .ir import (
    And,
    App,
    Cmp,
    Definition,
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
    SymbolRole,
    Term,
    Var,
    check_formula,
    free_vars,
)
from .ir.formulas import walk
from .reports import write_assertions
from .solver.session import open_session

logger = logging.getLogger(__name__)


def _names(f: Formula) -> set[str]:
    taken = {var.name for node in walk(f) if isinstance(node, Quant) for var in node.vars}
    return taken | {var.name for var in free_vars(f)}


class Refinement:
    """Rewrites assertions over `high` into assertions over `low`.

    High-level definitions missing from `low` are carried down with their
    bodies rewritten; `protocol` is `low` extended by them.
    """

    def __init__(self, mapping: RefinementMapping, low: Protocol, high: Protocol) -> None:
        self.mapping = mapping
        self.low = low
        self.high = high
        self.carried: dict[str, Definition] = {}
        self._prefixes = variable_prefixes(low)

    @property
    def protocol(self) -> Protocol:
        return self.low.with_definitions(list(self.carried.values()))

    def _target(self, name: str) -> tuple[str, int]:
        entry = self.mapping.target(name)
        if entry is not None:
            return entry.low, entry.extra
        if self.high.has_definition(name):
            if not self.low.has_definition(name) and name not in self.carried:
                self._carry(name)
            return name, 0
        if self.high.has_symbol(name) and self.high.symbol(name).role is SymbolRole.RIGID and self.low.has_symbol(name):
            return name, 0
        raise MappingError(f"{self.high.name}.{name} has no counterpart in {self.low.name}")

    def _carry(self, name: str) -> None:
        definition = self.high.definition(name)
        self.carried[name] = definition
        fresh: list[Var] = []
        taken = _names(definition.body) | {var.name for var in definition.params}
        body = self._rewrite(definition.body, fresh, taken)
        if fresh:
            body = Quant("forall", tuple(fresh), body)
        self.carried[name] = Definition(name, definition.params, body, definition.line)
        logger.info("carrying definition %s from %s down to %s", name, self.high.name, self.low.name)

    def _fresh(self, base: str, sort: str, taken: set[str]) -> Var:
        stem = base[:1].upper() + base[1:] if base else self._prefixes.get(sort, "X")
        name, counter = stem, 1
        while name in taken:
            counter += 1
            name = f"{stem}{counter}"
        taken.add(name)
        return Var(name, sort)

    def _term(self, term: Term) -> Term:
        if isinstance(term, App):
            name, extra = self._target(term.symbol)
            if extra:
                raise MappingError(f"function {term.symbol} cannot gain arguments")
            return App(name, tuple(self._term(arg) for arg in term.args))
        return term

    def _rewrite(self, f: Formula, fresh: list[Var], taken: set[str]) -> Formula:
        def go(node: Formula) -> Formula:
            if isinstance(node, Pred):
                name, extra = self._target(node.symbol)
                args = tuple(self._term(arg) for arg in node.args)
                if extra:
                    target = self.low.symbol(name)
                    sorts = target.arg_sorts[-extra:]
                    names = target.arg_names[-extra:] if len(target.arg_names) == target.arity else ("",) * extra
                    added = tuple(self._fresh(base, sort, taken) for base, sort in zip(names, sorts))
                    fresh.extend(added)
                    args += added
                return Pred(name, args)
            if isinstance(node, Eq):
                return Eq(self._term(node.left), self._term(node.right))
            if isinstance(node, Cmp):
                return Cmp(node.op, self._term(node.left), self._term(node.right))
            if isinstance(node, Member):
                return Member(self._term(node.element), self._term(node.subset))
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

    def apply(self, assertion: QuantifiedAssertion) -> QuantifiedAssertion:
        """Added arguments become fresh universal variables at the end of the prefix."""

        fresh: list[Var] = []
        taken = _names(assertion.formula())
        antecedent = self._rewrite(assertion.antecedent, fresh, taken)
        matrix = self._rewrite(assertion.matrix, fresh, taken)
        mapped = replace(
            assertion,
            prefix=assertion.prefix + tuple(("forall", var) for var in fresh),
            antecedent=antecedent,
            matrix=matrix,
        )
        issues = check_formula(mapped.formula(), self.protocol, where=assertion.name)
        if issues:
            raise MappingError(f"{assertion.name} does not map into {self.low.name}: {issues[0].message}")
        return mapped


def apply_mapping(
    assertion: QuantifiedAssertion,
    mapping: RefinementMapping,
    low: Protocol,
    high: Protocol,
) -> QuantifiedAssertion:
    return Refinement(mapping, low, high).apply(assertion)


# Levels


@dataclass(frozen=True)
class LevelResult:
    name: str
    protocol: Protocol
    report: ConvergenceReport
    inherited: tuple[QuantifiedAssertion, ...]
    learned: tuple[QuantifiedAssertion, ...]
    minimized: Optional[tuple[QuantifiedAssertion, ...]] = None
    matches_reference: Optional[bool] = None
    files: tuple[Path, ...] = ()

    @property
    def invariant(self) -> tuple[QuantifiedAssertion, ...]:
        """Assertions conjoined with Safety: everything inherited plus everything learned here."""

        return self.inherited + self.learned

    def as_dict(self) -> dict[str, Any]:
        payload = self.report.as_dict()
        payload.update({
            "level": self.name,
            "inherited": len(self.inherited),
            "learned": len(self.learned),
            "assertions": len(self.invariant),
            "minimized": None if self.minimized is None else len(self.minimized),
            "matches_reference": self.matches_reference,
            "files": [str(path) for path in self.files],
        })
        return payload


def prove_level(
    protocol: Protocol,
    inherited: Sequence[QuantifiedAssertion],
    sizes: SizeAssignment,
    config: RunConfig | None = None,
    *,
    name: Optional[str] = None,
    first: Optional[int] = None,
) -> LevelResult:
    """Converge `protocol` with `inherited` as strengthening; new assertions continue the A-numbering."""

    inherited = tuple(inherited)
    report = converge(protocol, sizes, strengthening=inherited, config=config)
    start = len(inherited) + 1 if first is None else first
    learned = tuple(item.renamed(f"A{start + offset}") for offset, item in enumerate(report.assertions))
    logger.info(
        "level %s: %s with %d inherited and %d new assertions",
        name or protocol.name,
        report.status,
        len(inherited),
        len(learned),
    )
    return LevelResult(name or protocol.name, protocol, report, inherited, learned)


def _certify_level(
    level: HierarchyLevel,
    result: LevelResult,
    config: RunConfig,
) -> LevelResult:
    """Minimise the level invariant and compare it with the reference set at the final sizes."""

    if not config.output.minimize and level.reference_path is None:
        return result
    instance = instantiate(result.protocol, result.report.sizes)
    prop = instance.safety
    minimized: Optional[tuple[QuantifiedAssertion, ...]] = None
    match: Optional[bool] = None
    with open_session(instance, config.solver, label="certify") as session:
        if config.output.minimize:
            minimized = tuple(minimize(instance, prop, result.invariant, session=session))
        if level.reference_path is not None:
            reference = parse_assertions(level.reference_path.read_text(encoding="utf-8"), result.protocol)
            match = equivalent(
                instance,
                invariant_node(instance, prop, result.invariant),
                invariant_node(instance, prop, reference.assertions),
                session=session,
            )
            logger.info("level %s %s its reference invariant", level.name, "matches" if match else "differs from")
    return replace(result, minimized=minimized, matches_reference=match)


@dataclass(frozen=True)
class _Loaded:
    level: HierarchyLevel
    protocol: Protocol
    mapping: Optional[RefinementMapping]


def load_chain(hierarchy: HierarchyConfig) -> list[_Loaded]:
    """Parse every level and check every mapping before any solving starts."""

    loaded: list[_Loaded] = []
    for level in hierarchy.levels:
        protocol = parse_protocol(level.protocol_path.read_text(encoding="utf-8"))
        mapping = None
        if level.mapping_path is not None and loaded:
            mapping = parse_mapping(level.mapping_path.read_text(encoding="utf-8"))
            above = loaded[-1].protocol
            issues = check_mapping(mapping, protocol, above)
            if issues:
                rendered = "; ".join(item.message for item in issues[:5])
                raise MappingError(f"mapping {level.mapping_path.name} is broken: {rendered}")
        loaded.append(_Loaded(level, protocol, mapping))
    return loaded


@dataclass(frozen=True)
class HierarchyResult:
    name: str
    levels: tuple[LevelResult, ...]
    completed: bool
    seconds: float = 0.0
    failed: Optional[str] = None

    @property
    def final(self) -> Optional[LevelResult]:
        return self.levels[-1] if self.levels else None


def run_hierarchy(
    hierarchy: HierarchyConfig,
    config: RunConfig | None = None,
    *,
    out_dir: Optional[Path] = None,
) -> HierarchyResult:
    """Prove every level in order; a level that does not converge stops the chain."""

    config = config or RunConfig()
    started = time.monotonic()
    chain = load_chain(hierarchy)
    results: list[LevelResult] = []
    above: Optional[LevelResult] = None
    for item in chain:
        protocol = item.protocol
        inherited: tuple[QuantifiedAssertion, ...] = ()
        if above is not None and item.mapping is not None:
            refinement = Refinement(item.mapping, protocol, above.protocol)
            inherited = tuple(refinement.apply(assertion) for assertion in above.invariant)
            protocol = refinement.protocol
        result = prove_level(
            protocol,
            inherited,
            SizeAssignment.of(item.level.sizes),
            config,
            name=item.level.name,
        )
        if result.report.converged:
            result = _certify_level(item.level, result, config)
        if out_dir is not None:
            files = [write_assertions(out_dir / f"{item.level.name}.inv", protocol.name, result.invariant)]
            if result.minimized is not None:
                files.append(write_assertions(out_dir / f"{item.level.name}.min.inv", protocol.name, result.minimized))
            result = replace(result, files=tuple(files))
        results.append(result)
        if not result.report.converged:
            logger.warning("hierarchy %s stopped at level %s (%s)", hierarchy.name, item.level.name, result.report.status)
            return HierarchyResult(hierarchy.name, tuple(results), False, time.monotonic() - started, item.level.name)
        above = result
    return HierarchyResult(hierarchy.name, tuple(results), True, time.monotonic() - started)


__all__ = [
    "HierarchyResult",
    "LevelResult",
    "Refinement",
    "apply_mapping",
    "load_chain",
    "prove_level",
    "run_hierarchy",
]
