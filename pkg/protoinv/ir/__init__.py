"""Sorted first-order intermediate representation of protocols."""

from .formulas import (
    BOOL,
    FALSE,
    TRUE,
    And,
    App,
    BoolConst,
    Cmp,
    DomainConst,
    Eq,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    Pred,
    Quant,
    QuorumPolicy,
    QuorumPolicyKind,
    Sort,
    SortKind,
    Symbol,
    SymbolRole,
    Term,
    Var,
    conjoin,
    constants_of,
    disjoin,
    free_vars,
    is_closed,
    map_terms,
    rename_symbols,
    replace_constants,
    substitute,
    symbols_of,
)
from .protocol import (
    Action,
    Axiom,
    Definition,
    PointUpdate,
    Protocol,
    Update,
    UpdateKind,
    check_formula,
    term_sort,
    validate,
)

__all__ = [
    "Action",
    "And",
    "App",
    "Axiom",
    "BOOL",
    "BoolConst",
    "Cmp",
    "Definition",
    "DomainConst",
    "Eq",
    "FALSE",
    "Formula",
    "Iff",
    "Implies",
    "Member",
    "Not",
    "Or",
    "PointUpdate",
    "Pred",
    "Protocol",
    "Quant",
    "QuorumPolicy",
    "QuorumPolicyKind",
    "Sort",
    "SortKind",
    "Symbol",
    "SymbolRole",
    "TRUE",
    "Term",
    "Update",
    "UpdateKind",
    "Var",
    "check_formula",
    "conjoin",
    "constants_of",
    "disjoin",
    "free_vars",
    "is_closed",
    "map_terms",
    "rename_symbols",
    "replace_constants",
    "substitute",
    "symbols_of",
    "term_sort",
    "validate",
]
