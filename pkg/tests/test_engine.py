from __future__ import annotations

import pytest

from protoinv.certifier import check_inductive, check_trace
from protoinv.config import EngineConfig, RunConfig
from protoinv.engine import Inconclusive, Proof, Trace, prove
from protoinv.frontend import bundled
from protoinv.grounding import SizeAssignment, evaluate, instantiate


def _instance(name: str, sizes: str):
    return instantiate(bundled(name), SizeAssignment.parse(sizes))


def test_a_single_value_needs_no_assertions():
    instance = _instance("voting", "value=1,acceptor=2,ballot=3")

    outcome = prove(instance, RunConfig(engine=EngineConfig(debug_checks=True)))

    assert isinstance(outcome, Proof)
    assert outcome.status == "proved"
    assert outcome.assertions == ()
    assert outcome.statistics["queries"] > 0


def test_singleton_quorums_choose_two_values():
    instance = _instance("voting_noaxiom", "value=2,acceptor=2,ballot=3")

    outcome = prove(instance)

    assert isinstance(outcome, Trace)
    assert outcome.status == "counterexample"
    assert outcome.steps[0].action is None
    assert all(step.action for step in outcome.steps[1:])
    assert evaluate(instance.init, outcome.states[0])
    assert not evaluate(instance.safety, outcome.states[-1])
    assert check_trace(instance, outcome).valid


def test_obligation_budget_ends_the_run_inconclusive():
    instance = _instance("voting", "value=2,acceptor=3,ballot=4")
    config = RunConfig(engine=EngineConfig(max_obligations=1))

    outcome = prove(instance, config)

    assert isinstance(outcome, Inconclusive)
    assert outcome.resource == "obligations"
    assert outcome.status == "inconclusive"


@pytest.mark.slow
def test_voting_invariant_is_inductive_at_the_reference_sizes():
    instance = _instance("voting", "value=2,acceptor=3,ballot=4")

    outcome = prove(instance)

    assert isinstance(outcome, Proof)
    assert [item.name for item in outcome.assertions] == [f"L{index}" for index in range(1, len(outcome.assertions) + 1)]
    assert all(item.is_closed for item in outcome.assertions)
    assert check_inductive(instance, instance.safety, outcome.assertions).passed


@pytest.mark.slow
def test_symmetry_off_still_proves_voting():
    instance = _instance("voting", "value=2,acceptor=2,ballot=3")
    config = RunConfig(engine=EngineConfig(symmetry=False, range=False))

    outcome = prove(instance, config)

    assert isinstance(outcome, Proof)
    assert check_inductive(instance, instance.safety, outcome.assertions).passed
