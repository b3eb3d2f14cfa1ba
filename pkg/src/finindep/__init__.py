"""Finite-diagram experiments with dividing and independence relations.

The package works entirely with finite partial diagrams of four universal
theories (cyclic orders with unordered pairs, generic binary functions,
colored graphs with edge witnesses, and a point-line incidence class).
It provides algebraic closure with an independent duplication oracle,
bounded dividing checks certified by explicit arrays, the derived
independence relations, and randomized audits of the axioms an
independence relation is expected to satisfy.
"""

from .structures import (
    BudgetExceeded,
    FinStructure,
    Signature,
    SignatureError,
    StructureBuilder,
    canonical_code,
    disjoint_union_over,
    extend_builder,
    find_embeddings,
    generated_substructure,
    is_embedding,
    isomorphic,
)
from .literal import LiteralError, format_structure, parse_structure
from .theories import (
    ClassViolation,
    NoCompletion,
    TheorySpec,
    builtin,
    builtin_names,
    complete_in_class,
    in_class,
)
from .typespace import (
    acl,
    acl_cross_check,
    conjugates,
    duplication_test,
    same_type,
    same_type_across,
)
from .amalgam import AxiomReport, axiom_suite, free_amalgam, free_independent

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "BudgetExceeded",
    "ClassViolation",
    "FinStructure",
    "LiteralError",
    "NoCompletion",
    "Signature",
    "SignatureError",
    "StructureBuilder",
    "TheorySpec",
    "acl",
    "acl_cross_check",
    "axiom_suite",
    "builtin",
    "builtin_names",
    "canonical_code",
    "complete_in_class",
    "conjugates",
    "disjoint_union_over",
    "duplication_test",
    "extend_builder",
    "find_embeddings",
    "format_structure",
    "free_amalgam",
    "free_independent",
    "generated_substructure",
    "in_class",
    "is_embedding",
    "isomorphic",
    "parse_structure",
    "same_type",
    "same_type_across",
    "__version__",
]
