"""Bundled protocol corpus: the four-level Paxos hierarchy and its reference invariants."""

from pathlib import Path


CORPUS_DIR = Path(__file__).resolve().parent
PAXOS_HIERARCHY_PATH = CORPUS_DIR / "paxos4.hchy"


__all__ = [
    "CORPUS_DIR",
    "PAXOS_HIERARCHY_PATH",
]
