from __future__ import annotations

import pytest

from protoinv.errors import ParseError, ValidationError
from protoinv.frontend import (
    CORPUS_NAMES,
    assertions_text,
    bundled,
    bundled_assertions,
    bundled_hierarchy,
    bundled_mapping,
    formula_text,
    mapping_text,
    parse_assertions,
    parse_formula,
    parse_mapping,
    parse_protocol,
)
from protoinv.frontend.corpus import UnknownProtocolError
from protoinv.frontend.sexpr import read_all
from protoinv.ir import Var


def test_every_corpus_level_parses_with_its_reference_assertions():
    counts = {name: len(bundled_assertions(name)) for name in CORPUS_NAMES}

    assert counts == {"voting": 2, "simple_paxos": 6, "implicit_paxos": 8, "paxos": 11}
    assert bundled("voting").name == "Voting"
    assert bundled("paxos").symbol("none").result == "value"


def test_unknown_corpus_names_are_rejected():
    with pytest.raises(UnknownProtocolError):
        bundled("multi_paxos")


def test_reader_reports_the_position_of_an_unclosed_form():
    with pytest.raises(ParseError) as caught:
        read_all("(protocol X\n  (sort a symmetric)")

    assert caught.value.line == 1
    assert caught.value.column == 1


def test_formula_printing_reads_back_to_the_same_formula():
    text = (
        "(forall ((A acceptor) (B ballot)) "
        "(=> (and (msg1b A B) (!= B -1)) (exists ((Q quorum)) (member A Q))))"
    )
    formula = parse_formula(text)

    assert parse_formula(formula_text(formula)) == formula


def test_formula_scope_turns_names_into_variables():
    scope = {"a": Var("a", "acceptor")}

    formula = parse_formula("(votes a b v)", scope)

    assert formula.args[0] == Var("a", "acceptor")
    assert formula.args[1].symbol == "b"


def test_assertion_files_must_name_their_protocol():
    voting = bundled("voting")

    with pytest.raises(ParseError):
        parse_assertions("(assertions Paxos (assert A1 true))", voting)


def test_assertion_files_reject_duplicate_names():
    voting = bundled("voting")
    text = "(assertions Voting (assert A1 true) (assert A1 false))"

    with pytest.raises(ParseError):
        parse_assertions(text, voting)


def test_assertions_with_unknown_symbols_do_not_parse():
    voting = bundled("voting")
    text = "(assertions Voting (assert A1 (forall ((A acceptor)) (msg1b A))))"

    with pytest.raises(ParseError):
        parse_assertions(text, voting)


def test_assertion_file_printing_keeps_names_and_order():
    document = bundled_assertions("simple_paxos")

    again = parse_assertions(assertions_text(document), bundled("simple_paxos"))

    assert again.names() == ["A1", "A2", "A3", "A4", "A5", "A6"]
    assert again.assertions == document.assertions


def test_mapping_with_added_arguments():
    mapping = bundled_mapping("implicit_paxos", "simple_paxos")

    entry = mapping.target("msg1b")
    assert entry is not None
    assert (entry.low, entry.extra) == ("msg1b", 2)
    assert parse_mapping(mapping_text(mapping)) == mapping


def test_mapping_composition_adds_extra_arguments():
    upper = bundled_mapping("simple_paxos", "voting")
    lower = bundled_mapping("implicit_paxos", "simple_paxos")

    composed = upper.then(lower)

    assert composed.low == "ImplicitPaxos"
    assert composed.high == "Voting"
    votes = composed.target("votes")
    assert votes is not None
    assert (votes.low, votes.extra) == ("msg2b", 0)


def test_mapping_rejects_existential_added_arguments():
    text = "(mapping (from L) (to H) (map r r (extra exists 1)))"

    with pytest.raises(ParseError):
        parse_mapping(text)


def test_shipped_hierarchy_lists_four_levels_most_abstract_first():
    hierarchy = bundled_hierarchy()

    assert [level.name for level in hierarchy.levels] == ["voting", "simple_paxos", "implicit_paxos", "paxos"]
    assert hierarchy.levels[0].mapping_path is None
    assert all(level.mapping_path is not None for level in hierarchy.levels[1:])
    assert all(level.sizes == {"value": 2, "acceptor": 3, "ballot": 4} for level in hierarchy.levels)


def test_protocol_validation_errors_carry_diagnostics():
    text = """
    (protocol Broken
      (sort ballot ordered)
      (relation seen (b ballot))
      (init (forall ((B ballot)) (not (seen B))))
      (safety true))
    """
    with pytest.raises((ValidationError, ParseError)):
        parse_protocol(text)
