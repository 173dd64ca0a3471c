"""Certified numeric kernel: balls, exact algebraic numbers, orbit grids."""

from .algebraic import (
    DEFAULT_DEGREE_CAP,
    AlgebraicNumber,
    DegreeCapExceeded,
    format_value,
    parse_value,
)
from .angles import AngleGrid, Window, window_member_exact
from .ball import BallComplex, BallReal
from .ops import (
    DEFAULT_PREC,
    exact_add,
    exact_mul,
    floor_exact,
    frac,
    is_exact,
    prec_ceiling,
    refine,
    sign_exact,
    to_ball,
    values_equal,
)

__all__ = [
    "AlgebraicNumber",
    "AngleGrid",
    "BallComplex",
    "BallReal",
    "DEFAULT_DEGREE_CAP",
    "DEFAULT_PREC",
    "DegreeCapExceeded",
    "Window",
    "exact_add",
    "exact_mul",
    "floor_exact",
    "format_value",
    "frac",
    "is_exact",
    "parse_value",
    "prec_ceiling",
    "refine",
    "sign_exact",
    "to_ball",
    "values_equal",
    "window_member_exact",
]
