"""Access to the bundled corpus by short name."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from ..corpus import CORPUS_DIR, PAXOS_HIERARCHY_PATH
from ..errors import ProtoinvError
from ..ir import Protocol
from .documents import AssertionFile, HierarchyConfig, RefinementMapping
from .parser import parse_assertions, parse_hierarchy, parse_mapping, parse_protocol

CORPUS_NAMES = ("voting", "simple_paxos", "implicit_paxos", "paxos")
_VARIANTS = ("voting_noaxiom",)
_MAPPINGS = {
    ("simple_paxos", "voting"): "simple_paxos_to_voting.map",
    ("implicit_paxos", "simple_paxos"): "implicit_paxos_to_simple_paxos.map",
    ("paxos", "implicit_paxos"): "paxos_to_implicit_paxos.map",
}


class UnknownProtocolError(ProtoinvError):
    code = "unknown_protocol"


def corpus_path(filename: str) -> Path:
    path = CORPUS_DIR / filename
    if not path.is_file():
        raise UnknownProtocolError(f"corpus has no file {filename}")
    return path


def _known(name: str) -> str:
    if name not in CORPUS_NAMES and name not in _VARIANTS:
        choices = ", ".join(CORPUS_NAMES + _VARIANTS)
        raise UnknownProtocolError(f"unknown corpus protocol {name!r}; expected one of {choices}")
    return name


@lru_cache(maxsize=None)
def bundled(name: str) -> Protocol:
    """Parse and validate one corpus protocol."""

    text = corpus_path(f"{_known(name)}.ptp").read_text(encoding="utf-8")
    return parse_protocol(text)


def bundled_assertions(name: str) -> AssertionFile:
    """The hand-written reference assertions shipped for `name`."""

    protocol = bundled(name)
    text = corpus_path(f"{_known(name)}_human.inv").read_text(encoding="utf-8")
    return parse_assertions(text, protocol)


def bundled_mapping(low: str, high: str) -> RefinementMapping:
    try:
        filename = _MAPPINGS[(low, high)]
    except KeyError:
        raise UnknownProtocolError(f"corpus has no mapping from {low} to {high}") from None
    return parse_mapping(corpus_path(filename).read_text(encoding="utf-8"))


def bundled_hierarchy() -> HierarchyConfig:
    return parse_hierarchy(PAXOS_HIERARCHY_PATH.read_text(encoding="utf-8"), PAXOS_HIERARCHY_PATH.parent)


__all__ = [
    "CORPUS_NAMES",
    "UnknownProtocolError",
    "bundled",
    "bundled_assertions",
    "bundled_hierarchy",
    "bundled_mapping",
    "corpus_path",
]
