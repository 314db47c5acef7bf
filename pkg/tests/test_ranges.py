from __future__ import annotations

import itertools

from hypothesis import assume, given
from hypothesis import strategies as st

from protoinv.boost import RangeBounds, Verdict, ordered_variants, safe_subset, synthesize_antecedent
from protoinv.frontend import bundled
from protoinv.grounding import Clause, SizeAssignment, instantiate, literal_for
from protoinv.ir import Cmp, DomainConst, Var


def test_lower_bound_on_the_first_position_is_enough():
    safe = {(1, 2), (1, 3), (2, 3)}

    bounds = synthesize_antecedent(safe, 4, 2)

    assert bounds == RangeBounds(lower=(0, None), upper=(None, None))
    assert bounds.atoms == 1


def test_every_variant_safe_needs_no_bounds():
    safe = set(itertools.combinations(range(4), 2))

    assert synthesize_antecedent(safe, 4, 2) == RangeBounds((None, None), (None, None))


def test_non_convex_safe_sets_have_no_interval_description():
    assert synthesize_antecedent({(0, 1), (2, 3)}, 4, 2) is None
    assert synthesize_antecedent(set(), 4, 2) is None


def test_bounds_become_a_chain_of_strict_comparisons():
    X1, X2 = Var("X1", "ballot"), Var("X2", "ballot")
    b_min = DomainConst("ballot", "b_min", 0)

    formula = RangeBounds((0, None), (None, None)).formula([X1, X2], lambda index: b_min)

    assert formula.items == (Cmp("<", b_min, X1), Cmp("<", X1, X2))


@st.composite
def bounded_sets(draw):
    size = draw(st.integers(min_value=2, max_value=6))
    k = draw(st.integers(min_value=1, max_value=min(3, size)))
    bound = st.one_of(st.none(), st.integers(min_value=0, max_value=size - 1))
    bounds = RangeBounds(
        tuple(draw(bound) for _ in range(k)),
        tuple(draw(bound) for _ in range(k)),
    )
    safe = {values for values in itertools.combinations(range(size), k) if bounds.admits(values)}
    return safe, size, k


@given(bounded_sets())
def test_sets_cut_out_by_bounds_are_recovered_exactly(case):
    safe, size, k = case
    assume(safe)

    bounds = synthesize_antecedent(safe, size, k)

    assert bounds is not None
    assert {values for values in itertools.combinations(range(size), k) if bounds.admits(values)} == safe


def test_variants_of_a_clause_enumerate_every_ballot():
    voting = instantiate(bundled("voting"), SizeAssignment.parse("value=2,acceptor=3,ballot=4"))
    clause = Clause.of([literal_for(voting, "votes(a1,b1,v1)", False)])

    variants = ordered_variants(voting, clause, "ballot")

    assert variants is not None
    assert variants.base_values == (1,)
    assert [item.values for item in variants.variants] == [(0,), (1,), (2,), (3,)]
    assert variants.safe() == {(1,)}

    checked = safe_subset(variants, lambda item: Verdict.UNSAFE if item.values == (0,) else Verdict.SAFE)

    assert checked.safe() == {(1,), (2,), (3,)}
    assert synthesize_antecedent(checked.safe(), 4, 1) == RangeBounds((0,), (None,))
