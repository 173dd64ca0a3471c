"""Evaluation of coding-digit power series at algebraic bases, exactly
enclosed, plus the supporting field arithmetic and relation probing."""

from .field import FieldElem
from .numbers import (
    Base,
    CCoefficient,
    DigitSequence,
    KeyInequalityReport,
    c_coefficients,
    check_key_inequality,
    partial_alpha,
    sturmian_number,
)
from .relations import (
    BaseRelation,
    NoneBelowBound,
    Relation,
    integer_relation,
    lll_reduce,
    relation_over_base,
)

__all__ = [
    "Base",
    "BaseRelation",
    "CCoefficient",
    "DigitSequence",
    "FieldElem",
    "KeyInequalityReport",
    "NoneBelowBound",
    "Relation",
    "c_coefficients",
    "check_key_inequality",
    "integer_relation",
    "lll_reduce",
    "partial_alpha",
    "relation_over_base",
    "sturmian_number",
]
