from __future__ import annotations

import pytest

from protoinv.errors import SortError
from protoinv.ir import (
    TRUE,
    And,
    App,
    DomainConst,
    Eq,
    Pred,
    Quant,
    Var,
    conjoin,
    free_vars,
    is_closed,
    rename_symbols,
    replace_constants,
    substitute,
    symbols_of,
    validate,
)
from protoinv.frontend import bundled, parse_formula, parse_protocol

A = Var("A", "acceptor")
B = Var("B", "ballot")
Y = Var("Y", "acceptor")


def test_conjoin_drops_true_and_unwraps_singletons():
    atom = Pred("p", (A,))

    assert conjoin([]) == TRUE
    assert conjoin([TRUE, atom]) == atom
    assert conjoin([atom, atom]) == And((atom, atom))


def test_free_variables_respect_binders():
    body = And((Pred("votes", (A, B)), Eq(App("maxBal", (A,)), B)))
    closed = Quant("forall", (A,), body)

    assert free_vars(body) == {A, B}
    assert free_vars(closed) == {B}
    assert not is_closed(closed)
    assert is_closed(Quant("exists", (B,), closed))


def test_substitution_renames_a_binder_that_would_capture():
    formula = Quant("forall", (Y,), Pred("p", (A, Y)))

    result = substitute(formula, {A: Y})

    fresh = Var("Y_1", "acceptor")
    assert result == Quant("forall", (fresh,), Pred("p", (Y, fresh)))


def test_substitution_rejects_a_sort_mismatch():
    with pytest.raises(SortError):
        substitute(Pred("p", (A,)), {A: B})


def test_rename_symbols_reaches_nested_function_applications():
    formula = parse_formula("(forall ((A acceptor)) (votes A (maxBal A)))")

    renamed = rename_symbols(formula, {"votes": "msg2b", "maxBal": "mbal"})

    assert symbols_of(renamed) == {"msg2b", "mbal"}


def test_replace_constants_only_touches_listed_constants():
    b1 = DomainConst("ballot", "b1", 1)
    b2 = DomainConst("ballot", "b2", 2)
    formula = Pred("msg1a", (b1,))

    assert replace_constants(formula, {b1: B}) == Pred("msg1a", (B,))
    assert replace_constants(formula, {b2: B}) == formula


def test_corpus_protocols_validate_cleanly():
    for name in ("voting", "simple_paxos", "implicit_paxos", "paxos", "voting_noaxiom"):
        assert validate(bundled(name)) == []


def test_validation_reports_unknown_symbols():
    text = """
    (protocol Broken
      (sort acceptor symmetric)
      (relation seen (a acceptor))
      (init (forall ((A acceptor)) (not (seen A))))
      (safety (forall ((A acceptor)) (heard A))))
    """
    protocol = parse_protocol(text, check=False)

    issues = validate(protocol)

    assert issues
    assert any("heard" in item.message for item in issues)
