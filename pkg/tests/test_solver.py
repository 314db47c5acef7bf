from __future__ import annotations

import io

import pytest

from protoinv.config import SolverConfig
from protoinv.errors import SolverError, SolverProtocolError, SolverTransportError
from protoinv.frontend import bundled
from protoinv.grounding import SizeAssignment, instantiate
from protoinv.solver import (
    InitCheck,
    ProcessTransport,
    StepContext,
    Z3RuntimeAdapter,
    check_sat,
    implies,
    one_step_query,
    open_session,
    runtime_for,
    shrink_cube,
)
from protoinv.solver.dimacs import parse_sat_output, render_dimacs
from protoinv.solver.smtlib import SmtRenderer

EMBEDDED = SolverConfig(transport="embedded")


@pytest.fixture(scope="module")
def voting():
    return instantiate(bundled("voting"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"))


@pytest.fixture
def session(voting):
    with open_session(voting, EMBEDDED, label="test") as opened:
        yield opened


def _step_context(session):
    instance = session.instance
    frame = session.activation("frame0")
    step = session.activation("step")
    session.add(instance.init, guard=frame)
    session.add(instance.transition.step, guard=step)
    return StepContext((frame,), step)


def test_initial_states_satisfy_safety(voting, session):
    assert implies(session, voting.init, voting.safety)

    result = check_sat(session, [voting.init])

    assert result.sat
    assert result.state["maxBal(a1)"] == 0
    assert not result.state["votes(a2,b1,v2)"]


def test_unsat_core_comes_from_the_assumptions(voting, session):
    b = voting.builder
    vote = b.atom("votes(a1,b1,v1)")
    unrelated = b.eq("maxBal(a2)", 0)

    result = check_sat(session, [voting.init], [unrelated, vote], debug=True)

    assert result.unsat
    assert vote in result.core
    assert set(result.core) <= {vote, unrelated}


def test_embedded_session_repeats_a_query_after_pop(voting):
    b = voting.builder
    shared = b.conj([b.atom("votes(a1,b1,v1)"), b.eq("maxBal(a1)", 1)])

    with open_session(voting, SolverConfig()) as opened:
        assert opened.transport.name == "embedded"
        first = check_sat(opened, [voting.init, shared])
        second = check_sat(opened, [shared])
        third = check_sat(opened, [voting.init, shared])

    assert first.unsat
    assert second.sat
    assert second.state["votes(a1,b1,v1)"]
    assert third.unsat


def test_scoped_definitions_are_sent_again_after_pop(voting):
    b = voting.builder
    renderer = SmtRenderer(voting)
    node = b.disj([b.atom("votes(a1,b1,v1)"), b.atom("votes(a2,b1,v1)")])
    out: list[str] = []

    renderer.push()
    name = renderer.expression(node, out)
    renderer.pop()
    again: list[str] = []
    assert renderer.expression(node, again) == name

    assert len(out) == 1 and again == out
    assert not any("global-declarations" in line for line in Z3RuntimeAdapter(EMBEDDED).preamble())


def test_session_scopes_are_balanced(voting, session):
    with pytest.raises(SolverError):
        session.pop()
    check_sat(session, [voting.builder.true])
    assert session.depth == 0
    assert session.stats.queries == 1


def test_one_step_reaches_a_raised_ballot_but_not_a_vote(voting, session):
    b = voting.builder
    context = _step_context(session)

    raised = one_step_query(session, context, [b.eq("maxBal(a1)", 1)], debug=True)
    voted = one_step_query(session, context, [b.atom("votes(a1,b1,v1)"), b.eq("maxBal(a3)", 0)])

    assert raised.sat
    assert raised.state["maxBal(a1)"] == 0
    assert raised.successor["maxBal(a1)"] == 1
    assert voted.unsat
    assert b.atom("votes(a1,b1,v1)") in voted.core


def test_shrunk_cube_stays_blocked_and_disjoint_from_init(voting, session):
    b = voting.builder
    context = _step_context(session)
    init = InitCheck(session, session.activation("init"))
    cube = [b.atom("votes(a1,b1,v1)"), b.eq("maxBal(a2)", 0), b.eq("maxBal(a3)", 0)]

    kept = shrink_cube(session, context, cube, init)

    assert 1 <= len(kept) <= len(cube)
    assert set(kept) <= set(cube)
    assert one_step_query(session, context, kept).unsat
    assert not init.intersects(kept)


def test_identical_conversations_have_identical_transcript_digests(voting):
    digests = []
    for _ in range(2):
        with open_session(voting, EMBEDDED) as opened:
            check_sat(opened, [voting.init])
            digests.append(opened.transcript_digest)

    assert digests[0] == digests[1]


def test_runtime_is_chosen_from_the_executable_name():
    assert runtime_for(SolverConfig(path="/opt/bin/cvc5")).kind == "cvc5"
    assert runtime_for(SolverConfig(path="z3-4.13")).kind == "z3"
    command = Z3RuntimeAdapter(SolverConfig(path="z3", args=("-v:0",))).build_command()
    assert command == ["z3", "-in", "-smt2", "-v:0"]


class FakeProcess:
    def __init__(self, output: str) -> None:
        self.stdin = io.StringIO()
        self.stdout = io.StringIO(output)
        self.stderr = io.StringIO("")
        self.returncode = None

    def poll(self):
        return self.returncode

    def wait(self, timeout=None):
        self.returncode = 0
        return 0

    def terminate(self):
        self.returncode = -15

    def kill(self):
        self.returncode = -9


def test_process_transport_reads_up_to_the_ready_marker():
    process = FakeProcess("sat\n\"protoinv-ready\"\n")
    transport = ProcessTransport(Z3RuntimeAdapter(SolverConfig(path="z3")), popen=lambda *args, **kwargs: process)

    answer = transport.exchange(["(check-sat)"])
    transport.close()

    assert answer == "sat\n"
    assert "(check-sat)" in process.stdin.getvalue()
    assert process.stdin.getvalue().endswith("(exit)\n")


def test_process_transport_reports_a_closed_output():
    process = FakeProcess("")
    transport = ProcessTransport(Z3RuntimeAdapter(SolverConfig(path="z3")), popen=lambda *args, **kwargs: process)

    with pytest.raises(SolverTransportError):
        transport.exchange(["(check-sat)"])


def test_process_transport_reports_a_missing_executable():
    def missing(*args, **kwargs):
        raise FileNotFoundError("no such file")

    transport = ProcessTransport(Z3RuntimeAdapter(SolverConfig(path="/nowhere/z3")), popen=missing)

    with pytest.raises(SolverTransportError) as caught:
        transport.exchange(["(check-sat)"])
    assert caught.value.code == "solver_unavailable"


def test_dimacs_rendering_and_answers():
    assert render_dimacs(2, [(1, -2), (2,)]) == "p cnf 2 2\n1 -2 0\n2 0\n"
    assert parse_sat_output("c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n") == {1, -2, 3}
    assert parse_sat_output("s UNSATISFIABLE\n") is None
    with pytest.raises(SolverProtocolError):
        parse_sat_output("segfault")
