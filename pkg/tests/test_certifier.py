from __future__ import annotations

import pytest

from protoinv.certifier import check_inductive, check_trace, equivalent, invariant_node, minimize
from protoinv.config import SolverConfig
from protoinv.engine import Trace, TraceStep
from protoinv.frontend import bundled, bundled_assertions
from protoinv.grounding import SizeAssignment, init_state, instantiate
from protoinv.solver import open_session

VOTING = instantiate(bundled("voting"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"))
HUMAN = bundled_assertions("voting").assertions


def test_reference_voting_invariant_is_inductive():
    certificate = check_inductive(VOTING, VOTING.safety, HUMAN)

    assert certificate.passed
    assert certificate.check is None


def test_dropping_vote_safety_fails_consecution_with_a_witness():
    certificate = check_inductive(VOTING, VOTING.safety, HUMAN[1:])

    assert not certificate.passed
    assert certificate.check == "consecution"
    assert certificate.state is not None
    assert certificate.successor is not None


def test_minimize_drops_a_repeated_assertion():
    repeated = HUMAN[1].renamed("A3")

    kept = minimize(VOTING, VOTING.safety, [*HUMAN, repeated])

    assert [item.name for item in kept] == ["A1", "A2"]


def test_minimize_refuses_a_set_that_is_not_inductive():
    with pytest.raises(ValueError):
        minimize(VOTING, VOTING.safety, HUMAN[:1])


def test_equivalence_of_ground_invariants():
    full = invariant_node(VOTING, VOTING.safety, HUMAN)
    again = invariant_node(VOTING, VOTING.safety, [*HUMAN, HUMAN[0].renamed("A3")])

    with open_session(VOTING, SolverConfig(transport="embedded"), label="certify") as session:
        assert equivalent(VOTING, full, again, session=session)
        assert not equivalent(VOTING, full, VOTING.safety, session=session)


def test_empty_and_non_initial_traces_are_rejected():
    assert check_trace(VOTING, Trace(VOTING.label, ())).reason == "empty trace"

    start = dict(init_state(VOTING))
    start["votes(a1,b1,v1)"] = True
    verdict = check_trace(VOTING, Trace(VOTING.label, (TraceStep(start),)))

    assert not verdict.valid
    assert verdict.step == 0


def test_a_trace_that_stays_safe_is_not_a_counterexample():
    start = init_state(VOTING)
    raised = dict(start)
    raised["maxBal(a1)"] = 1
    trace = Trace(VOTING.label, (TraceStep(start), TraceStep(raised, "IncreaseMaxBal(a1,b1)")))

    verdict = check_trace(VOTING, trace)

    assert not verdict.valid
    assert verdict.step == 1
    assert "satisfies the property" in verdict.reason


def test_unknown_actions_are_reported_by_step():
    start = init_state(VOTING)
    trace = Trace(VOTING.label, (TraceStep(start), TraceStep(start, "Decide(a1)")))

    verdict = check_trace(VOTING, trace)

    assert verdict.step == 1
    assert "Decide(a1)" in verdict.reason


CUTOFFS = {
    "voting": "value=2,acceptor=3,ballot=4",
    "simple_paxos": "value=2,acceptor=3,ballot=4",
    "implicit_paxos": "value=2,acceptor=3,ballot=5",
    "paxos": "value=2,acceptor=3,ballot=4",
}


def _at_cutoff(name):
    return instantiate(bundled(name), SizeAssignment.parse(CUTOFFS[name]))


@pytest.mark.parametrize("name", sorted(CUTOFFS))
def test_every_reference_invariant_is_inductive_at_its_cutoff(name):
    instance = _at_cutoff(name)

    assert check_inductive(instance, instance.safety, bundled_assertions(name).assertions).passed


@pytest.mark.parametrize(
    ("name", "dropped"),
    [
        ("simple_paxos", "A3"),
        ("simple_paxos", "A4"),
        ("simple_paxos", "A5"),
        ("implicit_paxos", "A7"),
        ("implicit_paxos", "A8"),
        ("paxos", "A10"),
        ("paxos", "A11"),
    ],
)
def test_load_bearing_assertions_cannot_be_dropped(name, dropped):
    instance = _at_cutoff(name)
    rest = [item for item in bundled_assertions(name).assertions if item.name != dropped]

    assert not check_inductive(instance, instance.safety, rest).passed


@pytest.mark.slow
def test_minimizing_the_paxos_reference_removes_exactly_the_voting_assertions():
    instance = _at_cutoff("paxos")

    kept = minimize(instance, instance.safety, bundled_assertions("paxos").assertions)

    assert [item.name for item in kept] == [f"A{index}" for index in range(3, 12)]
