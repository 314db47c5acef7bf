"""Readers and writers for protocol, assertion, mapping and hierarchy files."""

from .corpus import CORPUS_NAMES, bundled, bundled_assertions, bundled_hierarchy, bundled_mapping, corpus_path
from .documents import AssertionFile, HierarchyConfig, HierarchyLevel, RefinementMapping, SymbolMap, check_mapping
from .parser import parse_assertions, parse_formula, parse_hierarchy, parse_mapping, parse_protocol
from .printer import assertions_text, formula_text, mapping_text, protocol_text

__all__ = [
    "AssertionFile",
    "CORPUS_NAMES",
    "HierarchyConfig",
    "HierarchyLevel",
    "RefinementMapping",
    "SymbolMap",
    "assertions_text",
    "bundled",
    "bundled_assertions",
    "bundled_hierarchy",
    "bundled_mapping",
    "check_mapping",
    "corpus_path",
    "formula_text",
    "mapping_text",
    "parse_assertions",
    "parse_formula",
    "parse_hierarchy",
    "parse_mapping",
    "parse_protocol",
    "protocol_text",
]
