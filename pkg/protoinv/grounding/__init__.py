"""Finite instances: domains, atom tables and ground formulas."""

from .clauses import Clause, Cube, Literal, literal_for, literal_of_node
from .evaluate import State, complete, evaluate, evaluate_pair, fired_actions, init_state, render_state
from .expand import EnumAtom, Expander, expand
from .ground import GroundBuilder, Node, Op, atom_key, atom_keys, is_primed, primed, unprimed
from .instance import AtomInfo, Domain, FiniteInstance, SizeAssignment, SizeError, build_domains, instantiate
from .transition import ActionInstance, Transition, ground_transition

__all__ = [
    "ActionInstance",
    "AtomInfo",
    "Clause",
    "Cube",
    "Domain",
    "EnumAtom",
    "Expander",
    "FiniteInstance",
    "GroundBuilder",
    "Literal",
    "Node",
    "Op",
    "SizeAssignment",
    "SizeError",
    "State",
    "Transition",
    "atom_key",
    "atom_keys",
    "build_domains",
    "complete",
    "evaluate",
    "evaluate_pair",
    "expand",
    "fired_actions",
    "ground_transition",
    "init_state",
    "instantiate",
    "is_primed",
    "literal_for",
    "literal_of_node",
    "primed",
    "render_state",
    "unprimed",
]
