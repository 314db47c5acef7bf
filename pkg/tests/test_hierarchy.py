from __future__ import annotations

from dataclasses import replace

import pytest

from protoinv import hierarchy as hierarchy_module
from protoinv.boost import from_formula
from protoinv.config import RunConfig
from protoinv.convergence import ConvergenceReport
from protoinv.engine import Proof
from protoinv.errors import MappingError
from protoinv.frontend import (
    bundled,
    bundled_assertions,
    bundled_hierarchy,
    bundled_mapping,
    parse_formula,
    parse_hierarchy,
)
from protoinv.frontend.corpus import corpus_path
from protoinv.grounding import SizeAssignment
from protoinv.hierarchy import Refinement, apply_mapping, load_chain, prove_level, run_hierarchy


def _assertion(level: str, name: str):
    return next(item for item in bundled_assertions(level).assertions if item.name == name)


def test_vote_safety_maps_onto_2b_messages():
    mapped = apply_mapping(
        _assertion("voting", "A1"),
        bundled_mapping("simple_paxos", "voting"),
        bundled("simple_paxos"),
        bundled("voting"),
    )

    assert mapped.name == "A1"
    assert mapped.formula() == _assertion("simple_paxos", "A1").formula()


def test_added_arguments_become_trailing_universals():
    mapped = apply_mapping(
        _assertion("simple_paxos", "A6"),
        bundled_mapping("implicit_paxos", "simple_paxos"),
        bundled("implicit_paxos"),
        bundled("simple_paxos"),
    )

    expected = _assertion("implicit_paxos", "A6")
    assert [var.name for var in mapped.universals] == ["A", "B", "B_max", "V_max"]
    assert mapped.formula() == expected.formula()


def test_identity_mapping_keeps_every_assertion():
    mapping = bundled_mapping("paxos", "implicit_paxos")
    low, high = bundled("paxos"), bundled("implicit_paxos")

    for item in bundled_assertions("implicit_paxos").assertions:
        assert apply_mapping(item, mapping, low, high).formula() == item.formula()


def test_missing_definitions_are_carried_down():
    simple = bundled("simple_paxos")
    dropped = {"isSafeAt", "showsSafeAt"}
    low = replace(
        simple,
        definitions=tuple(item for item in simple.definitions if item.name not in dropped),
        symbols=tuple(item for item in simple.symbols if item.name not in dropped),
    )
    refinement = Refinement(bundled_mapping("simple_paxos", "voting"), low, bundled("voting"))

    mapped = refinement.apply(_assertion("voting", "A1"))

    assert set(refinement.carried) == dropped
    assert refinement.protocol.has_definition("isSafeAt")
    assert "votes" not in repr(refinement.carried["showsSafeAt"].body)
    assert "msg2b" in repr(mapped.matrix)


def test_symbols_without_counterpart_are_rejected():
    stray = from_formula("A9", parse_formula("(forall ((A acceptor)) (= (maxBal A) -1))"))
    mapping = replace(bundled_mapping("simple_paxos", "voting"), symbols=())

    with pytest.raises(MappingError):
        apply_mapping(stray, mapping, bundled("simple_paxos"), bundled("voting"))


def _copy(tmp_path, *names):
    for name in names:
        (tmp_path / name).write_text(corpus_path(name).read_text(encoding="utf-8"), encoding="utf-8")


def test_broken_mappings_fail_before_any_solving(tmp_path):
    _copy(tmp_path, "voting.ptp", "simple_paxos.ptp")
    (tmp_path / "partial.map").write_text("(mapping (from SimplePaxos) (to Voting) (map votes msg2b))", encoding="utf-8")
    text = """
    (hierarchy broken
      (level voting (protocol "voting.ptp") (size value 2 acceptor 3 ballot 4))
      (level simple_paxos (protocol "simple_paxos.ptp") (size value 2 acceptor 3 ballot 4) (mapping "partial.map")))
    """

    with pytest.raises(MappingError) as caught:
        load_chain(parse_hierarchy(text, tmp_path))
    assert "maxBal" in caught.value.message


def test_shipped_chain_loads_with_mappings():
    chain = load_chain(bundled_hierarchy())

    assert [item.protocol.name for item in chain] == ["Voting", "SimplePaxos", "ImplicitPaxos", "Paxos"]
    assert chain[0].mapping is None
    assert all(item.mapping is not None for item in chain[1:])


def test_new_assertions_continue_the_inherited_numbering(monkeypatch):
    voting = bundled("voting")
    inherited = bundled_assertions("voting").assertions
    learned = tuple(item.renamed(f"L{index}") for index, item in enumerate(inherited, start=1))
    sizes = SizeAssignment.parse("value=2,acceptor=3,ballot=4")
    proof = Proof("Voting(2,3,3,4)", learned, (frozenset(), frozenset()), 1)

    def fake_converge(protocol, base, *, strengthening=(), config=None):
        return ConvergenceReport(protocol.name, base, base, "converged", (), proof, tuple(strengthening))

    monkeypatch.setattr(hierarchy_module, "converge", fake_converge)

    result = prove_level(voting, inherited, sizes, RunConfig(), name="voting")

    assert [item.name for item in result.learned] == ["A3", "A4"]
    assert [item.name for item in result.invariant] == ["A1", "A2", "A3", "A4"]
    assert result.as_dict()["inherited"] == 2


def test_instance_only_levels_stop_the_chain(monkeypatch):
    human = bundled_assertions("voting").assertions
    proof = Proof("Voting(2,3,3,4)", (replace(human[0], ground=True),), (frozenset(),), 1)
    seen = []

    def fake_converge(protocol, base, *, strengthening=(), config=None):
        seen.append(protocol.name)
        return ConvergenceReport(protocol.name, base, base, "instance_only", (), proof, tuple(strengthening))

    monkeypatch.setattr(hierarchy_module, "converge", fake_converge)

    result = run_hierarchy(bundled_hierarchy(), RunConfig())

    assert seen == ["Voting"]
    assert not result.completed
    assert result.failed == "voting"
    assert result.levels[0].minimized is None


@pytest.mark.slow
def test_two_level_chain_writes_invariants(tmp_path):
    _copy(tmp_path, "voting.ptp", "simple_paxos.ptp", "simple_paxos_to_voting.map", "voting_human.inv")
    text = """
    (hierarchy pair
      (level voting (protocol "voting.ptp") (size value 2 acceptor 3 ballot 4) (reference "voting_human.inv"))
      (level simple_paxos (protocol "simple_paxos.ptp") (size value 2 acceptor 3 ballot 4)
        (mapping "simple_paxos_to_voting.map")))
    """

    result = run_hierarchy(parse_hierarchy(text, tmp_path), RunConfig(), out_dir=tmp_path / "out")

    assert result.completed
    assert result.levels[0].matches_reference is not None
    assert (tmp_path / "out" / "voting.inv").is_file()
    assert (tmp_path / "out" / "simple_paxos.min.inv").is_file()
    assert len(result.levels[1].inherited) == len(result.levels[0].invariant)
