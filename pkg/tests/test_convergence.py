from __future__ import annotations

from dataclasses import replace

import pytest

from protoinv import convergence as convergence_module
from protoinv.config import ConvergenceConfig, RunConfig
from protoinv.convergence import (
    ConvergenceReport,
    Iteration,
    converge,
    independent_sizes,
    saturation_check,
    scope_counts,
)
from protoinv.engine import Proof
from protoinv.frontend import bundled, bundled_assertions
from protoinv.grounding import SizeAssignment

VOTING = bundled("voting")
HUMAN = [item.formula() for item in bundled_assertions("voting").assertions]


def test_variables_in_scope_inline_definitions():
    assert scope_counts(VOTING, [VOTING.safety]) == {"value": 2, "acceptor": 1, "quorum": 1, "ballot": 1}
    assert scope_counts(VOTING, [VOTING.safety, *HUMAN]) == {"value": 2, "acceptor": 2, "quorum": 1, "ballot": 3}


def test_reference_sizes_saturate_the_voting_invariant():
    check = saturation_check(VOTING, [VOTING.safety, *HUMAN], SizeAssignment.parse("value=2,acceptor=3,ballot=4"))

    assert check.ok


@pytest.mark.parametrize(
    ("sizes", "grow"),
    [
        ("value=1,acceptor=3,ballot=4", "value"),
        ("value=2,acceptor=1,ballot=4", "acceptor"),
        ("value=2,acceptor=3,ballot=3", "ballot"),
        ("value=1,acceptor=1,ballot=2", "value"),
    ],
)
def test_too_small_sorts_grow_in_declaration_order(sizes, grow):
    check = saturation_check(VOTING, [VOTING.safety, *HUMAN], SizeAssignment.parse(sizes))

    assert check.grow == grow


def test_filled_symmetric_sort_is_enough():
    check = saturation_check(VOTING, [VOTING.safety, *HUMAN], SizeAssignment.parse("value=2,acceptor=2,ballot=4"))

    assert check.ok


def test_subset_sorts_are_not_sized_independently():
    sizes = SizeAssignment.parse("value=2,acceptor=3,quorum=3,ballot=4")

    assert independent_sizes(VOTING, sizes).as_dict() == {"value": 2, "acceptor": 3, "ballot": 4}


def test_growth_marks_only_the_sorts_that_changed():
    proof = Proof("Voting(2,3,3,4)", (), (), 2, {"queries": 7, "seconds": 0.5})
    base = SizeAssignment.parse("value=2,acceptor=3,ballot=3")
    final = SizeAssignment.parse("value=2,acceptor=3,ballot=4")
    iterations = (
        Iteration(base, "proved", grow="ballot", statistics={"queries": 5, "seconds": 0.25}),
        Iteration(final, "proved", gate="passed", statistics=proof.statistics),
    )
    report = ConvergenceReport("Voting", base, final, "converged", iterations, proof)

    assert report.growth() == {"value": "2", "acceptor": "3", "ballot": "3 ↦ 4"}
    assert report.queries() == 12
    assert report.seconds() == 0.75
    assert report.converged
    assert report.as_dict()["iterations"][0]["grow"] == "ballot"
    assert "3 ↦ 4" in report.render()


def test_growth_past_a_ceiling_is_inconclusive():
    config = RunConfig(convergence=ConvergenceConfig(max_size={"value": 1}))

    report = converge(VOTING, SizeAssignment.parse("value=1,acceptor=2,ballot=3"), config=config)

    assert report.status == "inconclusive"
    assert "value" in report.reason
    assert report.sizes["value"] == 1
    assert report.iterations[0].grow == "value"


def test_counterexamples_stop_the_loop():
    report = converge(bundled("voting_noaxiom"), SizeAssignment.parse("value=2,acceptor=2,ballot=3"))

    assert report.status == "counterexample"
    assert not report.converged
    assert len(report.iterations) == 1


def _ground_fallback_proof(sizes):
    human = bundled_assertions("voting").assertions
    assertions = (human[0], replace(human[1], ground=True))
    return Proof(f"Voting{sizes}", assertions, (frozenset(), frozenset()), 1, {"queries": 3})


def test_ground_assertions_still_go_through_the_gate(monkeypatch):
    gated = []
    monkeypatch.setattr(convergence_module, "prove", lambda instance, config, strengthening=(): _ground_fallback_proof(instance.sizes))
    monkeypatch.setattr(convergence_module, "semantic_gate", lambda *args: gated.append(args[1]) or None)

    report = converge(VOTING, SizeAssignment.parse("value=2,acceptor=3,ballot=4"))

    assert report.status == "instance_only"
    assert not report.converged
    assert len(gated) == 1
    assert report.iterations[-1].gate == "passed"


def test_a_failed_gate_grows_even_with_ground_assertions(monkeypatch):
    config = RunConfig(convergence=ConvergenceConfig(max_size={"ballot": 4}))
    monkeypatch.setattr(convergence_module, "prove", lambda instance, config, strengthening=(): _ground_fallback_proof(instance.sizes))
    monkeypatch.setattr(convergence_module, "semantic_gate", lambda *args: "ballot")

    report = converge(VOTING, SizeAssignment.parse("value=2,acceptor=3,ballot=4"), config=config)

    assert report.status == "inconclusive"
    assert report.iterations[-1].gate == "failed"
    assert report.iterations[-1].grow == "ballot"


@pytest.mark.slow
def test_voting_converges_from_a_small_instance():
    report = converge(VOTING, SizeAssignment.parse("value=2,acceptor=2,ballot=3"))

    assert report.converged
    assert report.iterations[-1].gate in ("passed", None)
    final = report.sizes.as_dict()
    assert all(final[sort] >= size for sort, size in report.base.items)


@pytest.mark.slow
def test_implicit_paxos_needs_one_more_ballot():
    inherited = bundled_assertions("implicit_paxos").assertions[:6]

    report = converge(bundled("implicit_paxos"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"), strengthening=inherited)

    assert report.converged
    assert report.growth()["ballot"] == "4 ↦ 5"
    assert report.sizes.as_dict() == {"value": 2, "acceptor": 3, "ballot": 5}
