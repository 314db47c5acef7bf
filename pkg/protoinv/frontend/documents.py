"""File-level documents: refinement mappings, assertion files and hierarchy configs."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..boost.assertions import QuantifiedAssertion
from ..errors import Diagnostic
from ..ir import BOOL, Protocol


@dataclass(frozen=True)
class SymbolMap:
    """One mapped high-level symbol; `extra` is the count of added trailing low-level arguments."""

    high: str
    low: str
    extra: int = 0


@dataclass(frozen=True)
class RefinementMapping:
    low: str
    high: str
    symbols: tuple[SymbolMap, ...]
    line: int | None = field(default=None, compare=False)

    def target(self, high_symbol: str) -> SymbolMap | None:
        for entry in self.symbols:
            if entry.high == high_symbol:
                return entry
        return None

    @classmethod
    def identity(cls, protocol: Protocol) -> "RefinementMapping":
        return cls(
            low=protocol.name,
            high=protocol.name,
            symbols=tuple(SymbolMap(item.name, item.name) for item in protocol.state_symbols),
        )

    def then(self, lower: "RefinementMapping") -> "RefinementMapping":
        """Compose `self` (mid -> high) with `lower` (low -> mid) into low -> high."""

        composed: list[SymbolMap] = []
        for entry in self.symbols:
            below = lower.target(entry.low)
            if below is None:
                composed.append(SymbolMap(entry.high, entry.low, entry.extra))
            else:
                composed.append(SymbolMap(entry.high, below.low, entry.extra + below.extra))
        return RefinementMapping(low=lower.low, high=self.high, symbols=tuple(composed))


def check_mapping(mapping: RefinementMapping, low: Protocol, high: Protocol) -> list[Diagnostic]:
    issues: list[Diagnostic] = []
    if mapping.low != low.name or mapping.high != high.name:
        issues.append(Diagnostic(
            "mapping-names",
            f"mapping connects {mapping.low}->{mapping.high}, expected {low.name}->{high.name}",
            mapping.line,
        ))
    for symbol in high.state_symbols:
        entry = mapping.target(symbol.name)
        if entry is None:
            issues.append(Diagnostic("unmapped-symbol", f"{high.name}.{symbol.name} is not mapped", mapping.line))
            continue
        if not low.has_symbol(entry.low):
            issues.append(Diagnostic("unknown-symbol", f"{low.name} has no symbol {entry.low}", mapping.line))
            continue
        target = low.symbol(entry.low)
        expected = symbol.arg_sorts
        actual = target.arg_sorts[: len(target.arg_sorts) - entry.extra] if entry.extra else target.arg_sorts
        if actual != expected or target.result != symbol.result:
            issues.append(Diagnostic(
                "signature-mismatch",
                f"{symbol.name}{_signature(symbol.arg_sorts, symbol.result)} cannot map to "
                f"{target.name}{_signature(target.arg_sorts, target.result)} with {entry.extra} added arguments",
                mapping.line,
            ))
        elif entry.extra and symbol.result != BOOL:
            issues.append(Diagnostic(
                "signature-mismatch",
                f"added arguments are only supported for relations, not {symbol.name}",
                mapping.line,
            ))
    return issues


def _signature(args: tuple[str, ...], result: str) -> str:
    return f"({', '.join(args)}) -> {result}"


@dataclass(frozen=True)
class AssertionFile:
    protocol: str | None
    assertions: tuple[QuantifiedAssertion, ...] = ()

    def __len__(self) -> int:
        return len(self.assertions)

    def names(self) -> list[str]:
        return [item.name for item in self.assertions]

    def without(self, name: str) -> "AssertionFile":
        return AssertionFile(self.protocol, tuple(item for item in self.assertions if item.name != name))


@dataclass(frozen=True)
class HierarchyLevel:
    name: str
    protocol_path: Path
    sizes: dict[str, int]
    mapping_path: Path | None = None
    reference_path: Path | None = None


@dataclass(frozen=True)
class HierarchyConfig:
    name: str
    levels: tuple[HierarchyLevel, ...]
    source: Path | None = None


__all__ = [
    "AssertionFile",
    "HierarchyConfig",
    "HierarchyLevel",
    "RefinementMapping",
    "SymbolMap",
    "check_mapping",
]
