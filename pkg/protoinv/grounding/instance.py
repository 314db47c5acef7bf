"""Finite instances: a protocol fixed at concrete sort sizes."""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

from ..errors import GroundingError
from ..ir import (
    And,
    DomainConst,
    Formula,
    Member,
    Protocol,
    Quant,
    QuorumPolicyKind,
    Sort,
    SymbolRole,
    Var,
)
from .expand import Expander
from .ground import GroundBuilder, Node, atom_key, primed
from .transition import Transition, ground_transition

logger = logging.getLogger(__name__)

_SIZE_ITEM = re.compile(r"^\s*([A-Za-z_][\w\-]*)\s*=\s*(-?\d+)\s*$")


class SizeError(GroundingError):
    code = "size_invalid"


@dataclass(frozen=True)
class SizeAssignment:
    """Sizes for the non-dependent sorts, in the order they were given."""

    items: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, sizes: Mapping[str, int] | None = None, **named: int) -> "SizeAssignment":
        merged = dict(sizes or {})
        merged.update(named)
        return cls(tuple(merged.items()))

    @classmethod
    def parse(cls, text: str) -> "SizeAssignment":
        """Read `value=2,acceptor=3,ballot=4`."""

        items: list[tuple[str, int]] = []
        for part in filter(None, (piece.strip() for piece in text.split(","))):
            match = _SIZE_ITEM.match(part)
            if match is None:
                raise SizeError(f"size entry {part!r} is not sort=n")
            items.append((match.group(1), int(match.group(2))))
        if not items:
            raise SizeError("no sizes given")
        return cls(tuple(items))

    def as_dict(self) -> dict[str, int]:
        return dict(self.items)

    def __getitem__(self, sort: str) -> int:
        return self.as_dict()[sort]

    def get(self, sort: str, default: int | None = None) -> int | None:
        return self.as_dict().get(sort, default)

    def __contains__(self, sort: object) -> bool:
        return sort in self.as_dict()

    def with_size(self, sort: str, size: int) -> "SizeAssignment":
        values = self.as_dict()
        values[sort] = size
        return SizeAssignment(tuple(values.items()))

    def bumped(self, sorts: list[str] | tuple[str, ...]) -> "SizeAssignment":
        values = self.as_dict()
        for sort in sorts:
            values[sort] = values[sort] + 1
        return SizeAssignment(tuple(values.items()))

    def __str__(self) -> str:
        return ",".join(f"{sort}={size}" for sort, size in self.items)


@dataclass(frozen=True)
class Domain:
    """The constants of one sort; subset sorts also record member indices."""

    sort: Sort
    constants: tuple[DomainConst, ...]
    members: tuple[frozenset[int], ...] = ()

    @property
    def size(self) -> int:
        return len(self.constants)

    def __iter__(self) -> Iterator[DomainConst]:
        return iter(self.constants)

    def by_name(self, name: str) -> DomainConst | None:
        for item in self.constants:
            if item.name == name:
                return item
        return None


@dataclass(frozen=True)
class AtomInfo:
    key: str
    symbol: str
    args: tuple[DomainConst, ...]
    sort: str | None
    aux: bool
    position: int

    @property
    def is_boolean(self) -> bool:
        return self.sort is None


def _prefix(sort: Sort, taken: set[str]) -> str:
    prefix = sort.name[0].lower()
    if prefix in taken:
        prefix = sort.name.lower()
    taken.add(prefix)
    return prefix


def _subset_indices(base_size: int, sort: Sort) -> list[frozenset[int]]:
    policy = sort.policy
    kind = policy.kind if policy is not None else QuorumPolicyKind.MAJORITY
    if kind is QuorumPolicyKind.EXPLICIT:
        groups = []
        for group in policy.members:  # type: ignore[union-attr]
            if not group or any(index < 1 or index > base_size for index in group):
                raise SizeError(f"explicit member {group} of {sort.name} is outside 1..{base_size}")
            groups.append(frozenset(index - 1 for index in group))
        return list(dict.fromkeys(groups))
    if kind is QuorumPolicyKind.SIZE:
        width = policy.size or 0  # type: ignore[union-attr]
    else:
        if base_size == 0:
            raise SizeError(f"majority subsets of an empty {sort.base} sort")
        width = base_size // 2 + 1
    if width < 1 or width > base_size:
        raise SizeError(f"subsets of size {width} do not exist over {base_size} elements of {sort.base}")
    return [frozenset(combo) for combo in itertools.combinations(range(base_size), width)]


def subset_count(base_size: int, sort: Sort) -> int:
    return len(_subset_indices(base_size, sort))


def build_domains(protocol: Protocol, sizes: SizeAssignment) -> dict[str, Domain]:
    given = sizes.as_dict()
    for name in given:
        if not protocol.has_sort(name):
            raise SizeError(f"{protocol.name} has no sort {name}")
    domains: dict[str, Domain] = {}
    taken: set[str] = set()
    for sort in protocol.sorts:
        if sort.is_subset:
            continue
        if sort.name not in given:
            raise SizeError(f"no size given for sort {sort.name}")
        size = given[sort.name]
        if size < 1:
            raise SizeError(f"sort {sort.name} needs a positive size, got {size}")
        prefix = _prefix(sort, taken)
        if sort.is_ordered:
            if size < 2:
                raise SizeError(f"ordered sort {sort.name} needs size >= 2, got {size}")
            names = [f"{prefix}_min"] + [f"{prefix}{index}" for index in range(1, size - 1)] + [f"{prefix}_max"]
        else:
            names = [f"{prefix}{index}" for index in range(1, size + 1)]
        domains[sort.name] = Domain(
            sort, tuple(DomainConst(sort.name, name, index) for index, name in enumerate(names))
        )
    for sort in protocol.sorts:
        if not sort.is_subset:
            continue
        base = domains[sort.base or ""]
        groups = sorted(_subset_indices(base.size, sort), key=lambda group: (len(group), sorted(group)))
        prefix = _prefix(sort, taken)
        separator = "_" if base.size > 9 else ""
        names = [prefix + separator.join(str(index + 1) for index in sorted(group)) for group in groups]
        derived = len(groups)
        if sort.name in given and given[sort.name] != derived:
            raise SizeError(
                f"sort {sort.name} is derived from {sort.base} and has {derived} elements, not {given[sort.name]}"
            )
        domains[sort.name] = Domain(
            sort,
            tuple(DomainConst(sort.name, name, index) for index, name in enumerate(names)),
            tuple(groups),
        )
    return domains


def _pins(protocol: Protocol, domains: dict[str, Domain]) -> dict[str, DomainConst]:
    """Rigid nullary constants resolved to fixed domain elements."""

    pins: dict[str, DomainConst] = {}
    for sort in protocol.sorts:
        if sort.is_ordered and sort.minimum:
            pins[sort.minimum] = domains[sort.name].constants[0]
    used: dict[str, int] = {}
    for symbol in protocol.symbols:
        if symbol.role is not SymbolRole.RIGID or symbol.arg_sorts:
            continue
        domain = domains.get(symbol.result)
        if domain is None or not domain.sort.is_symmetric:
            raise SizeError(f"rigid constant {symbol.name} needs a symmetric sort, not {symbol.result}")
        position = used.get(symbol.result, 0)
        if position >= domain.size:
            raise SizeError(f"sort {symbol.result} is too small for its rigid constants")
        pins[symbol.name] = domain.constants[position]
        used[symbol.result] = position + 1
    return pins


class FiniteInstance:
    """A protocol at concrete sizes, with atom tables and ground formulas.

    Ground formulas are built on first use and then cached; the builder's
    intern table is shared by everything grounded against this instance.
    """

    def __init__(self, protocol: Protocol, sizes: SizeAssignment) -> None:
        self.protocol = protocol
        self.sizes = sizes
        self.domains = build_domains(protocol, sizes)
        self.pins = _pins(protocol, self.domains)
        self.builder = GroundBuilder()
        self.state_atoms: tuple[AtomInfo, ...] = ()
        self.aux_atoms: tuple[AtomInfo, ...] = ()
        self._atoms: dict[str, AtomInfo] = {}
        self._build_tables()

    def __repr__(self) -> str:
        return f"FiniteInstance({self.protocol.name}, {self.sizes})"

    @property
    def label(self) -> str:
        sizes = ",".join(str(self.domains[sort.name].size) for sort in self.protocol.sorts)
        return f"{self.protocol.name}({sizes})"

    def _build_tables(self) -> None:
        atoms: list[AtomInfo] = []
        for symbol in self.protocol.state_symbols:
            result = None if symbol.is_relation else symbol.result
            for args in self.tuples(symbol.arg_sorts):
                atoms.append(AtomInfo(atom_key(symbol.name, args), symbol.name, args, result, False, len(atoms)))
        self.state_atoms = tuple(atoms)
        aux: list[AtomInfo] = []
        for definition in self.protocol.definition_order():
            for args in self.tuples(tuple(var.sort for var in definition.params)):
                aux.append(AtomInfo(
                    atom_key(definition.name, args), definition.name, args, None, True, len(atoms) + len(aux)
                ))
        self.aux_atoms = tuple(aux)
        self._atoms = {item.key: item for item in itertools.chain(self.state_atoms, self.aux_atoms)}

    def tuples(self, sorts: tuple[str, ...]) -> Iterator[tuple[DomainConst, ...]]:
        return itertools.product(*(self.domains[sort].constants for sort in sorts))

    def domain(self, sort: str) -> Domain:
        try:
            return self.domains[sort]
        except KeyError:
            raise GroundingError(f"{self.label} has no sort {sort}") from None

    def constant(self, sort: str, name: str) -> DomainConst:
        found = self.domain(sort).by_name(name)
        if found is None:
            raise GroundingError(f"{self.label} has no constant {name} of sort {sort}")
        return found

    def atom(self, key: str) -> AtomInfo:
        try:
            return self._atoms[key]
        except KeyError:
            raise GroundingError(f"{self.label} has no atom {key}") from None

    def has_atom(self, key: str) -> bool:
        return key in self._atoms

    @property
    def atoms(self) -> tuple[AtomInfo, ...]:
        return self.state_atoms + self.aux_atoms

    def domain_size(self, key: str) -> int:
        """Number of values of an enumerated atom (primed keys allowed)."""

        info = self.atom(key[:-1] if key.endswith("'") else key)
        if info.sort is None:
            return 2
        return self.domains[info.sort].size

    def member(self, element: DomainConst, subset: DomainConst) -> bool:
        domain = self.domain(subset.sort)
        return element.index in domain.members[subset.index]

    def pinned(self, sort: str) -> tuple[DomainConst, ...]:
        """Elements of `sort` fixed by rigid constants or an ordered minimum."""

        return tuple(dict.fromkeys(item for item in self.pins.values() if item.sort == sort))

    def pinned_name(self, constant: DomainConst) -> str | None:
        for name, item in self.pins.items():
            if item == constant:
                return name
        return None

    # Bit accounting

    @property
    def boolean_state_atoms(self) -> int:
        return sum(1 for item in self.state_atoms if item.is_boolean)

    @property
    def enumerated_state_atoms(self) -> int:
        return sum(1 for item in self.state_atoms if not item.is_boolean)

    def bits_for(self, info: AtomInfo) -> int:
        if info.is_boolean:
            return 1
        return (self.domains[info.sort or ""].size - 1).bit_length()

    @property
    def state_bits(self) -> int:
        return sum(self.bits_for(item) for item in self.state_atoms)

    # Ground formulas

    @cached_property
    def definition_bodies(self) -> tuple[tuple[AtomInfo, Node], ...]:
        """(aux atom, expanded body) pairs in dependency order, current frame."""

        expander = Expander(self)
        bodies = []
        for info in self.aux_atoms:
            definition = self.protocol.definition(info.symbol)
            env = dict(zip(definition.params, info.args))
            bodies.append((info, expander.formula(definition.body, env)))
        return tuple(bodies)

    @cached_property
    def definitions_current(self) -> Node:
        b = self.builder
        return b.conj(b.iff(b.atom(info.key), body) for info, body in self.definition_bodies)

    @cached_property
    def definitions_next(self) -> Node:
        b = self.builder
        return b.conj(b.iff(b.atom(primed(info.key)), b.prime(body)) for info, body in self.definition_bodies)

    @cached_property
    def init(self) -> Node:
        return Expander(self).formula(self.protocol.init)

    @cached_property
    def safety(self) -> Node:
        return Expander(self).formula(self.protocol.safety)

    @cached_property
    def transition(self) -> Transition:
        return ground_transition(self)

    def expand(self, formula: Formula, *, next_state: bool = False) -> Node:
        return Expander(self, next_state=next_state).formula(formula)

    def check_axioms(self) -> None:
        expander = Expander(self)
        axioms = [(item.name, item.formula) for item in self.protocol.axioms]
        for sort in self.protocol.sorts:
            policy = sort.policy
            if sort.is_subset and (policy is None or policy.kind is QuorumPolicyKind.MAJORITY):
                left, right = Var("Q1", sort.name), Var("Q2", sort.name)
                element = Var("A", sort.base or "")
                axioms.append((
                    f"{sort.name}-intersection",
                    Quant("forall", (left, right), Quant("exists", (element,), And((Member(element, left), Member(element, right))))),
                ))
        for name, formula in axioms:
            node = expander.formula(formula)
            if node is not self.builder.true:
                raise GroundingError(f"axiom {name} does not hold in {self.label}", code="axiom_violated")

    def statistics(self) -> dict[str, object]:
        transition = self.transition
        return {
            "instance": self.label,
            "sizes": {name: domain.size for name, domain in self.domains.items()},
            "state_atoms": len(self.state_atoms),
            "boolean_state_atoms": self.boolean_state_atoms,
            "enumerated_state_atoms": self.enumerated_state_atoms,
            "state_bits": self.state_bits,
            "aux_atoms": len(self.aux_atoms),
            "action_tuples": transition.raw_count,
            "action_disjuncts": len(transition.disjuncts),
            "per_action": transition.per_action(),
            "nodes": len(self.builder),
        }


def instantiate(protocol: Protocol, sizes: SizeAssignment) -> FiniteInstance:
    """Fix `protocol` at `sizes`; axioms are checked against the instance."""

    instance = FiniteInstance(protocol, sizes)
    instance.check_axioms()
    logger.info(
        "instantiated %s: %d state atoms, %d bits, %d auxiliary atoms",
        instance.label,
        len(instance.state_atoms),
        instance.state_bits,
        len(instance.aux_atoms),
    )
    return instance


__all__ = [
    "AtomInfo",
    "Domain",
    "FiniteInstance",
    "SizeAssignment",
    "SizeError",
    "atom_key",
    "build_domains",
    "instantiate",
    "subset_count",
]
