"""Incremental induction: frames, obligations, propagation and results."""

from .frames import Frames, Lemma
from .ic3 import Ic3Engine, Obligation, property_node, prove
from .results import Inconclusive, Outcome, Proof, Trace, TraceStep

__all__ = [
    "Frames",
    "Ic3Engine",
    "Inconclusive",
    "Lemma",
    "Obligation",
    "Outcome",
    "Proof",
    "Trace",
    "TraceStep",
    "property_node",
    "prove",
]
