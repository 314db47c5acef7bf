from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from protoinv.boost import expansion_matches, generators, group_order, infer_quantified, orbit
from protoinv.boost.symmetry import permute_clause
from protoinv.config import SolverConfig
from protoinv.frontend import bundled
from protoinv.grounding import Clause, SizeAssignment, instantiate, literal_for
from protoinv.ir import Var
from protoinv.solver import open_session

VOTING = instantiate(bundled("voting"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"))
VOTE_KEYS = [info.key for info in VOTING.state_atoms if info.symbol == "votes"]


def _clause(*keys: str) -> Clause:
    return Clause.of(literal_for(VOTING, key, False) for key in keys)


def test_group_order_multiplies_factorials_of_symmetric_sorts():
    assert group_order(VOTING) == 2 * 6
    assert len(generators(VOTING)) == 1 + 2


def test_pinned_elements_are_not_permuted():
    paxos = instantiate(bundled("paxos"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"))

    assert group_order(paxos) == 6
    assert all("value" not in perm.table for perm in generators(paxos))


def test_orbit_of_a_single_vote_covers_every_acceptor_and_value():
    clauses = orbit(VOTING, _clause("votes(a1,b1,v1)"))

    assert clauses is not None
    assert len(clauses) == 6
    assert _clause("votes(a3,b1,v2)") in clauses
    assert _clause("votes(a1,b2,v1)") not in clauses


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(VOTE_KEYS), min_size=1, max_size=3, unique=True))
def test_orbits_are_closed_and_divide_the_group_order(keys):
    clause = _clause(*keys)

    clauses = orbit(VOTING, clause)

    assert clauses is not None
    assert clause in clauses
    for perm in generators(VOTING):
        assert all(permute_clause(VOTING, item, perm) in clauses for item in clauses)
    assert group_order(VOTING) % len(clauses) == 0


def test_orbit_is_quantified_over_the_moved_constants():
    clause = _clause("votes(a1,b1,v1)")
    clauses = orbit(VOTING, clause)

    with open_session(VOTING, SolverConfig(transport="embedded")) as session:
        assertion = infer_quantified(VOTING, clause, clauses, name="L1", session=session)

    assert assertion is not None
    assert assertion.name == "L1"
    assert set(assertion.universals) == {Var("A1", "acceptor"), Var("V1", "value")}
    assert assertion.ground
    assert expansion_matches(VOTING, assertion, clauses)


def test_a_partial_orbit_does_not_match_its_quantified_form():
    clause = _clause("votes(a1,b1,v1)")
    clauses = orbit(VOTING, clause)
    assertion = infer_quantified(VOTING, clause, clauses)
    assert assertion is not None

    assert not expansion_matches(VOTING, assertion, [clause])
