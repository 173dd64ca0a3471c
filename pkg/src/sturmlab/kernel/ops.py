"""Dispatch helpers over the value union int/Fraction/AlgebraicNumber/Ball*.

``sign_exact``/``floor_exact``/``frac`` decide exactly for exact inputs and
raise :class:`Indeterminate` for balls that straddle the decision boundary.
``exact_add``/``exact_mul`` keep exact operands exact while the degree of the
product of minimal polynomials stays within the cap; above the cap they
degrade to ball arithmetic and mark the result (``degraded`` attribute).
"""

from __future__ import annotations

import os
from fractions import Fraction

from ..errors import Indeterminate, PrecisionExhausted, ValidationError
from .algebraic import DEFAULT_DEGREE_CAP, AlgebraicNumber, DegreeCapExceeded
from .ball import BallComplex, BallReal

DEFAULT_PREC = 256


def prec_ceiling() -> int:
    value = os.environ.get("STURMLAB_PREC_CEILING")
    if value:
        try:
            return max(64, int(value))
        except ValueError:
            pass
    return 1 << 20


class DegradedBallReal(BallReal):
    __slots__ = ()
    degraded = True


class DegradedBallComplex(BallComplex):
    __slots__ = ()
    degraded = True


BallReal.degraded = False
BallComplex.degraded = False


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, AlgebraicNumber))


def to_ball(value, prec: int = DEFAULT_PREC):
    """BallReal/BallComplex enclosure of any supported value."""
    if isinstance(value, (BallReal, BallComplex)):
        return value
    if isinstance(value, (int, Fraction)):
        return BallReal.from_fraction(value, prec)
    if isinstance(value, AlgebraicNumber):
        return value.refine(prec)
    raise ValidationError(f"unsupported value type {type(value).__name__}")


def sign_exact(value) -> int:
    """-1/0/+1; Indeterminate for a straddling ball."""
    if isinstance(value, (int, Fraction)):
        return (value > 0) - (value < 0)
    if isinstance(value, AlgebraicNumber):
        return value.sign_exact(prec_ceiling())
    if isinstance(value, BallReal):
        s = value.sign()
        if s is None:
            raise Indeterminate("sign of an enclosure containing zero")
        return s
    raise ValidationError(f"sign of unsupported type {type(value).__name__}")


def floor_exact(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator // value.denominator
    if isinstance(value, AlgebraicNumber):
        return value.floor_exact(prec_ceiling())
    if isinstance(value, BallReal):
        klo = value.lo.numerator // value.lo.denominator
        khi = value.hi.numerator // value.hi.denominator
        if klo != khi:
            raise Indeterminate("floor of an enclosure straddling an integer")
        return klo
    raise ValidationError(f"floor of unsupported type {type(value).__name__}")


def frac(value):
    """value - floor(value), preserving the input kind."""
    k = floor_exact(value)
    if isinstance(value, int):
        return 0
    if isinstance(value, Fraction):
        return value - k
    if isinstance(value, AlgebraicNumber):
        if value.is_rational:
            return AlgebraicNumber.from_rational(value.rational_value - k)
        return value.affine(1, -k)
    return value - BallReal.exact(k, value.prec)


def affine_value(value, a, b):
    """a*value + b (a, b rational) in the input's own kind."""
    if Fraction(a) == 0:
        return Fraction(b)
    if isinstance(value, int):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return Fraction(a) * value + Fraction(b)
    if isinstance(value, AlgebraicNumber):
        if value.is_rational:
            return Fraction(a) * value.rational_value + Fraction(b)
        return value.affine(a, b)
    if isinstance(value, BallReal):
        return value * Fraction(a) + Fraction(b)
    raise ValidationError(f"unsupported value type {type(value).__name__}")


def _degrade(a, b, op, prec: int):
    ba = to_ball(a, prec)
    bb = to_ball(b, prec)
    out = op(ba, bb)
    if isinstance(out, BallReal):
        return DegradedBallReal(out.lo, out.hi, out.prec)
    return DegradedBallComplex(out.re, out.im)


def exact_add(a, b, cap: int = DEFAULT_DEGREE_CAP, prec: int = DEFAULT_PREC):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) + Fraction(b)
    if is_exact(a) and is_exact(b):
        x = a if isinstance(a, AlgebraicNumber) else AlgebraicNumber.from_rational(a)
        try:
            return x.add(b, cap=cap)
        except DegreeCapExceeded:
            return _degrade(a, b, lambda u, v: u + v, prec)
    return to_ball(a, prec) + to_ball(b, prec)


def exact_mul(a, b, cap: int = DEFAULT_DEGREE_CAP, prec: int = DEFAULT_PREC):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) * Fraction(b)
    if is_exact(a) and is_exact(b):
        x = a if isinstance(a, AlgebraicNumber) else AlgebraicNumber.from_rational(a)
        try:
            return x.mul(b, cap=cap)
        except DegreeCapExceeded:
            return _degrade(a, b, lambda u, v: u * v, prec)
    return to_ball(a, prec) * to_ball(b, prec)


def values_equal(a, b) -> bool:
    """Exact equality for exact values."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) == Fraction(b)
    if not (is_exact(a) and is_exact(b)):
        raise ValidationError("equality needs exact values")
    x = a if isinstance(a, AlgebraicNumber) else AlgebraicNumber.from_rational(a)
    return x == (b if isinstance(b, AlgebraicNumber)
                 else AlgebraicNumber.from_rational(b))


def refine(value, prec: int):
    """Public refinement entry point: enclosure with relative radius 2**(1-prec)."""
    if prec > prec_ceiling():
        raise PrecisionExhausted(f"requested {prec} bits above the ceiling")
    return to_ball(value, prec)
