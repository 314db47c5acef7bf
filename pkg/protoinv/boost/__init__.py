"""Clause boosting: symmetry orbits, ordered ranges and the strategy that chains them."""

from .assertions import (
    Boosted,
    QuantifiedAssertion,
    clause_formula,
    from_formula,
    ground_assertion,
    variables_by_sort,
    with_pinned_names,
)
from .ranges import (
    OrderedVariantSet,
    RangeBounds,
    Variant,
    Verdict,
    boost_range,
    ordered_variants,
    safe_subset,
    synthesize_antecedent,
)
from .strategy import BoostStrategy
from .symmetry import Permutation, expansion_matches, generators, group_order, induced, infer_quantified, orbit

__all__ = [
    "BoostStrategy",
    "Boosted",
    "OrderedVariantSet",
    "Permutation",
    "QuantifiedAssertion",
    "RangeBounds",
    "Variant",
    "Verdict",
    "boost_range",
    "clause_formula",
    "expansion_matches",
    "from_formula",
    "generators",
    "ground_assertion",
    "group_order",
    "induced",
    "infer_quantified",
    "orbit",
    "ordered_variants",
    "safe_subset",
    "synthesize_antecedent",
    "variables_by_sort",
    "with_pinned_names",
]
