from __future__ import annotations

import json
from dataclasses import replace

from protoinv import cli as cli_module
from protoinv.cli import main
from protoinv.convergence import ConvergenceReport
from protoinv.engine import Proof
from protoinv.errors import EXIT_CERTIFICATION_FAILED, EXIT_COUNTEREXAMPLE, EXIT_ERROR, EXIT_OK
from protoinv.frontend import bundled_assertions
from protoinv.frontend.corpus import corpus_path
from protoinv.reports import write_assertions

SIZES = ["--size", "value=2,acceptor=3,ballot=4"]


def test_ground_prints_instance_statistics(capsys):
    code = main(["ground", "voting", *SIZES])

    assert code == EXIT_OK
    stats = json.loads(capsys.readouterr().out)
    assert stats["state_bits"] == 30
    assert stats["instance"] == "Voting(2,3,3,4)"


def test_certify_accepts_the_reference_invariant(capsys):
    reference = str(corpus_path("voting_human.inv"))

    code = main(["certify", "voting", *SIZES, "--inv", reference, "--compare", reference])

    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "inductive at Voting(2,3,3,4)" in out
    assert "equivalent to" in out


def test_certify_prints_a_witness_when_consecution_fails(tmp_path, capsys):
    partial = write_assertions(tmp_path / "partial.inv", "Voting", bundled_assertions("voting").assertions[1:])

    code = main(["certify", "voting", *SIZES, "--inv", str(partial)])

    assert code == EXIT_CERTIFICATION_FAILED
    out = capsys.readouterr().out
    assert "consecution fails" in out
    assert "(trace Voting" in out


def test_counterexample_is_written_and_replays(tmp_path):
    small = ["--size", "value=2,acceptor=2,ballot=3"]
    config = ["--set", f"output.dir={tmp_path}"]

    code = main([*config, "prove", "voting_noaxiom", *small])

    assert code == EXIT_COUNTEREXAMPLE
    trace = tmp_path / "Voting.trc"
    assert trace.is_file()
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["command"] == "prove"
    assert summary["levels"][0]["status"] == "counterexample"
    assert main([*config, "replay", "voting_noaxiom", *small, "--trace", str(trace)]) == EXIT_OK


def test_replay_rejects_a_trace_that_does_not_parse(tmp_path):
    broken = tmp_path / "broken.trc"
    broken.write_text("(trace Voting (state ((votes a1 b_min v1) perhaps)))", encoding="utf-8")

    assert main(["replay", "voting", *SIZES, "--trace", str(broken)]) == EXIT_ERROR


def test_input_errors_exit_with_the_error_code():
    assert main(["--set", "engine.max_frames=zero", "ground", "voting", *SIZES]) == EXIT_ERROR
    assert main(["ground", "no_such_protocol", *SIZES]) == EXIT_ERROR
    assert main(["ground", "voting", "--size", "value=2"]) == EXIT_ERROR
    assert main([]) == EXIT_ERROR


def test_converge_with_ground_assertions_is_not_a_success(tmp_path, monkeypatch, capsys):
    human = bundled_assertions("voting").assertions
    proof = Proof("Voting(2,3,3,4)", (replace(human[0], ground=True),), (frozenset(),), 1)

    def fake_converge(protocol, base, *, strengthening=(), config=None):
        return ConvergenceReport(protocol.name, base, base, "instance_only", (), proof, tuple(strengthening))

    monkeypatch.setattr(cli_module, "converge", fake_converge)

    code = main(["--set", f"output.dir={tmp_path}", "converge", "voting", *SIZES])

    assert code == EXIT_ERROR
    assert "instance_only" in capsys.readouterr().out
    assert json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))["levels"][0]["status"] == "instance_only"
