"""Dividing and forking checks over finite diagrams."""

from .engine import (
    Consistent,
    Divides,
    FailedPattern,
    ForksReport,
    JointInconsistent,
    NonDividingCertificate,
    NoWitnessFound,
    Realization,
    RelationVerdict,
    M_indep,
    a_indep,
    d_indep,
    da_indep,
    divides,
    forks_witness,
    joint_consistent,
    m_indep,
    nondividing_certificate,
)
from .formulas import (
    ExFormula,
    FormulaError,
    QFFormula,
    diagram_formula,
    elem,
    ground,
    holds,
    parse_formula,
    var,
)
from .patterns import ArrayInstance, ArrayPattern, Inconsistent, enumerate_patterns, instantiate_array

__all__ = [
    "ArrayInstance",
    "ArrayPattern",
    "Consistent",
    "Divides",
    "ExFormula",
    "FailedPattern",
    "ForksReport",
    "FormulaError",
    "Inconsistent",
    "JointInconsistent",
    "M_indep",
    "NoWitnessFound",
    "NonDividingCertificate",
    "QFFormula",
    "Realization",
    "RelationVerdict",
    "a_indep",
    "d_indep",
    "da_indep",
    "diagram_formula",
    "divides",
    "elem",
    "enumerate_patterns",
    "forks_witness",
    "ground",
    "holds",
    "instantiate_array",
    "joint_consistent",
    "m_indep",
    "nondividing_certificate",
    "parse_formula",
    "var",
]
