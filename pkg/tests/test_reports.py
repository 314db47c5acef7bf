from __future__ import annotations

import json

import pytest

from protoinv.convergence import ConvergenceReport, Iteration
from protoinv.engine import Proof, Trace, TraceStep
from protoinv.frontend import bundled, bundled_assertions, parse_assertions
from protoinv.grounding import SizeAssignment, init_state, instantiate
from protoinv.reports import (
    TraceFormatError,
    growth_table,
    read_trace,
    run_summary,
    trace_text,
    write_assertions,
    write_json,
    write_text_atomic,
)

VOTING = instantiate(bundled("voting"), SizeAssignment.parse("value=2,acceptor=2,ballot=3"))


def _state_only(state):
    return {info.key: state[info.key] for info in VOTING.state_atoms}


@pytest.fixture
def trace():
    start = _state_only(init_state(VOTING))
    raised = dict(start)
    raised["maxBal(a1)"] = 1
    return Trace(VOTING.label, (TraceStep(start), TraceStep(raised, "IncreaseMaxBal(a1,b1)")))


def test_trace_text_reads_back(trace):
    text = trace_text(VOTING, trace)

    assert text.startswith("(trace Voting\n  (state ((votes a1 b_min v1) false)")
    assert '(state "IncreaseMaxBal(a1,b1)" ' in text
    again = read_trace(VOTING, text)
    assert again.steps == trace.steps


def test_traces_for_another_protocol_are_rejected(trace):
    text = trace_text(VOTING, trace).replace("(trace Voting", "(trace Paxos", 1)

    with pytest.raises(TraceFormatError) as caught:
        read_trace(VOTING, text)
    assert caught.value.code == "trace_invalid"


@pytest.mark.parametrize(
    ("old", "new"),
    [("((maxBal a1) b_min)", "((maxBal a1) b7)"), ("((maxBal a1) b_min)", "((maxBal a9) b_min)"), ("false)", "maybe)")],
)
def test_trace_values_must_name_instance_elements(trace, old, new):
    text = trace_text(VOTING, trace).replace(old, new, 1)

    with pytest.raises(TraceFormatError):
        read_trace(VOTING, text)


def test_atomic_write_leaves_no_temporary_files(tmp_path):
    target = tmp_path / "nested" / "out.txt"

    write_text_atomic(target, "first\n")
    write_text_atomic(target, "second\n")

    assert target.read_text(encoding="utf-8") == "second\n"
    assert [item.name for item in target.parent.iterdir()] == ["out.txt"]


def test_written_assertions_parse_back(tmp_path):
    assertions = bundled_assertions("voting").assertions

    path = write_assertions(tmp_path / "voting.inv", "Voting", assertions)

    again = parse_assertions(path.read_text(encoding="utf-8"), bundled("voting"))
    assert again.assertions == assertions


def test_summary_totals_queries_and_assertions(tmp_path):
    levels = [
        {"protocol": "Voting", "assertions": 2, "queries": 40},
        {"protocol": "SimplePaxos", "assertions": 6, "queries": 60},
    ]

    summary = run_summary("hierarchy", levels, 1.23456, completed=True)
    path = write_json(tmp_path / "summary.json", summary)

    loaded = json.loads(path.read_text(encoding="utf-8"))
    assert loaded["queries"] == 100
    assert loaded["assertions"] == {"Voting": 2, "SimplePaxos": 6}
    assert loaded["seconds"] == 1.235
    assert loaded["completed"] is True


def test_growth_table_has_one_row_per_report():
    base = SizeAssignment.parse("value=2,acceptor=3,ballot=3")
    final = SizeAssignment.parse("value=2,acceptor=3,ballot=4")
    proof = Proof("Voting(2,3,3,4)", bundled_assertions("voting").assertions, (frozenset(), frozenset()), 2, {"queries": 9})
    report = ConvergenceReport("Voting", base, final, "converged", (Iteration(final, "proved", statistics={"queries": 9}),), proof)

    lines = growth_table([report]).splitlines()

    assert lines[0].split() == ["protocol", "status", "sizes", "assertions", "queries"]
    assert lines[1].startswith("Voting")
    assert "ballot = 3 ↦ 4" in lines[1]
    assert lines[1].split()[-2:] == ["2", "9"]
