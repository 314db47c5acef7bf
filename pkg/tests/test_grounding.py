from __future__ import annotations

import pytest

from protoinv.frontend import bundled
from protoinv.grounding import (
    Clause,
    Cube,
    SizeAssignment,
    SizeError,
    evaluate,
    init_state,
    instantiate,
    literal_for,
    render_state,
)
from protoinv.grounding.instance import subset_count

PAPER_SIZES = SizeAssignment.parse("value=2,acceptor=3,ballot=4")


@pytest.fixture(scope="module")
def voting():
    return instantiate(bundled("voting"), PAPER_SIZES)


def test_state_bits_of_the_corpus_at_the_reference_sizes():
    bits = {name: instantiate(bundled(name), PAPER_SIZES).state_bits for name in ("voting", "simple_paxos", "implicit_paxos", "paxos")}

    assert bits == {"voting": 30, "simple_paxos": 54, "implicit_paxos": 138, "paxos": 147}


def test_size_text_parses_in_order():
    sizes = SizeAssignment.parse(" value=2, acceptor=3 ,ballot=4")

    assert sizes.items == (("value", 2), ("acceptor", 3), ("ballot", 4))
    assert str(sizes) == "value=2,acceptor=3,ballot=4"
    assert sizes.bumped(["ballot"])["ballot"] == 5
    assert sizes.with_size("value", 3).as_dict() == {"value": 3, "acceptor": 3, "ballot": 4}


@pytest.mark.parametrize("text", ["", "value", "value=two", "value=2,acceptor"])
def test_malformed_size_text_is_rejected(text):
    with pytest.raises(SizeError):
        SizeAssignment.parse(text)


@pytest.mark.parametrize(
    "text",
    ["value=2,acceptor=3", "value=2,acceptor=3,ballot=1", "value=0,acceptor=3,ballot=4", "value=2,acceptor=3,ballot=4,round=2"],
)
def test_instances_need_a_usable_size_for_every_sort(text):
    with pytest.raises(SizeError):
        instantiate(bundled("voting"), SizeAssignment.parse(text))


def test_majority_quorums_are_derived_from_acceptors(voting):
    quorums = voting.domain("quorum")

    assert subset_count(3, bundled("voting").sort("quorum")) == 3
    assert [item.name for item in quorums] == ["q12", "q13", "q23"]
    a1 = voting.constant("acceptor", "a1")
    assert voting.member(a1, quorums.constants[0])
    assert not voting.member(a1, quorums.constants[2])


def test_ordered_sorts_pin_their_minimum(voting):
    ballots = voting.domain("ballot")

    assert [item.name for item in ballots] == ["b_min", "b1", "b2", "b_max"]
    assert voting.pins["-1"] == ballots.constants[0]


def test_guards_that_ground_to_false_are_dropped(voting):
    transition = voting.transition

    assert transition.raw_count == 3 * 4 + 3 * 4 * 2
    assert transition.find("IncreaseMaxBal(a1,b_min)") is None
    assert transition.find("IncreaseMaxBal(a1,b1)") is not None
    assert len(transition.disjuncts) < transition.raw_count


def test_initial_state_is_fixed_by_init(voting):
    state = init_state(voting)

    assert state is not None
    assert not state["votes(a1,b1,v1)"]
    assert state["maxBal(a1)"] == 0
    assert evaluate(voting.init, state)
    assert evaluate(voting.safety, state)
    assert render_state(voting, state)["maxBal(a2)"] == "b_min"


def test_cube_negation_is_a_clause_and_back(voting):
    vote = literal_for(voting, "votes(a1,b1,v1)", True)
    bal = literal_for(voting, "maxBal(a1)", 2)
    cube = Cube.of([vote, bal])

    clause = cube.negate()

    assert clause.negate() == cube
    assert {item.key for item in clause.literals} == {"votes(a1,b1,v1)", "maxBal(a1)"}
    state = {"votes(a1,b1,v1)": True, "maxBal(a1)": 2}
    assert cube.holds(state)
    assert not clause.holds(state)


def test_smaller_clause_subsumes_larger(voting):
    vote = literal_for(voting, "votes(a1,b1,v1)", False)
    bal = literal_for(voting, "maxBal(a1)", 1, positive=False)
    small = Clause.of([vote])
    large = Clause.of([bal, vote])

    assert small.subsumes(large)
    assert not large.subsumes(small)
    assert large.keys() == {"votes(a1,b1,v1)", "maxBal(a1)"}


def test_statistics_are_serialisable(voting):
    stats = voting.statistics()

    assert stats["state_bits"] == 30
    assert stats["sizes"] == {"value": 2, "acceptor": 3, "quorum": 3, "ballot": 4}
    assert stats["action_tuples"] == 36
