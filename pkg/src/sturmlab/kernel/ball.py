"""Outward-rounded interval arithmetic with exact dyadic endpoints.

A :class:`BallReal` stores a closed enclosure ``[lo, hi]`` whose endpoints are
exact dyadic rationals (``Fraction`` with power-of-two denominator), together
with the working precision that produced it.  The ``mid``/``rad`` view is
derived: ``mid = (lo+hi)/2`` and ``rad = (hi-lo)/2`` are again dyadic, and
``rad`` is reported outward-rounded to a short mantissa so printing stays
compact without ever shrinking the enclosure.

Arithmetic is delegated to per-precision mpmath interval contexts (cached, one
per precision, never mutated after creation) and results are pulled back to
exact endpoint rationals; mpmath interval endpoints are dyadic by
construction, so the round trip is exact.

:class:`BallComplex` is a rectangle ``re + i*im`` of two ``BallReal``;
products and quotients are expanded explicitly so the enclosure property is
inherited from the real operations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import libmp

from ..errors import DivisionByZero, Indeterminate, ValidationError

_RAD_MANTISSA = 32  # reported radii are rounded up to this many bits

_TWO = Fraction(2)


@lru_cache(maxsize=None)
def _ctx(prec: int):
    ctx = mpmath.ctx_iv.MPIntervalContext()
    ctx.prec = prec
    return ctx


def _is_dyadic(fr: Fraction) -> bool:
    q = fr.denominator
    return q & (q - 1) == 0


def _to_mpf_exact(fr: Fraction):
    """Exact conversion of a dyadic Fraction to an mpf (no rounding)."""
    num = fr.numerator
    shift = fr.denominator.bit_length() - 1
    with mpmath.workprec(max(num.bit_length(), 8)):
        return mpmath.ldexp(num, -shift)


def _from_raw_exact(raw) -> Fraction:
    """Exact Fraction from a raw libmp mpf tuple (no rounding)."""
    if raw in (libmp.finf, libmp.fninf, libmp.fnan):
        raise Indeterminate("interval endpoint overflowed to a non-finite value")
    p, q = libmp.to_rational(raw)
    return Fraction(int(p), int(q))  # int(): shed gmpy2 backend types


def _round_dyadic(fr: Fraction, bits: int, up: bool) -> Fraction:
    """Round fr to a dyadic with a mantissa of <= bits bits, toward +/-inf."""
    if fr == 0:
        return fr
    shift = bits - (fr.numerator.bit_length() - fr.denominator.bit_length())
    scale = _TWO ** shift
    scaled = fr * scale
    n = scaled.numerator // scaled.denominator  # floor, also for negatives
    if up and n * scaled.denominator != scaled.numerator:
        n += 1
    return Fraction(n) / scale


class BallReal:
    """Certified real enclosure.  All operations return supersets."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int = 53):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if not (_is_dyadic(lo) and _is_dyadic(hi)):
            raise ValidationError("ball endpoints must be dyadic rationals")
        if lo > hi:
            raise ValidationError("ball with lo > hi")
        self.lo = lo
        self.hi = hi
        self.prec = int(prec)

    # -- construction ----------------------------------------------------

    @classmethod
    def exact(cls, value, prec: int = 53) -> "BallReal":
        """Zero-radius ball; falls back to a tight enclosure if not dyadic."""
        fr = Fraction(value)
        if _is_dyadic(fr):
            return cls(fr, fr, prec)
        return cls.from_fraction(fr, prec)

    @classmethod
    def from_fraction(cls, value, prec: int = 53) -> "BallReal":
        fr = Fraction(value)
        if _is_dyadic(fr):
            return cls(fr, fr, prec)
        lo = _round_dyadic(fr, prec + 4, up=False)
        hi = _round_dyadic(fr, prec + 4, up=True)
        return cls(lo, hi, prec)

    @classmethod
    def hull_of(cls, *balls: "BallReal") -> "BallReal":
        lo = min(b.lo for b in balls)
        hi = max(b.hi for b in balls)
        prec = max(b.prec for b in balls)
        return cls(lo, hi, prec)

    # -- views -------------------------------------------------------------

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> Fraction:
        return _round_dyadic((self.hi - self.lo) / 2, _RAD_MANTISSA, up=True)

    def interval(self):
        ctx = _ctx(self.prec)
        return ctx.mpf([_to_mpf_exact(self.lo), _to_mpf_exact(self.hi)])

    @classmethod
    def _wrap(cls, iv_value, prec: int) -> "BallReal":
        a, b = iv_value._mpi_
        return cls(_from_raw_exact(a), _from_raw_exact(b), prec)

    def at_prec(self, prec: int) -> "BallReal":
        return BallReal(self.lo, self.hi, prec)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, BallReal):
            return other
        if isinstance(other, (int, Fraction)):
            return BallReal.from_fraction(other, self.prec)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = max(self.prec, o.prec)
        return BallReal._wrap(self.at_prec(prec).interval() + o.at_prec(prec).interval(), prec)

    __radd__ = __add__

    def __neg__(self):
        return BallReal(-self.hi, -self.lo, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = max(self.prec, o.prec)
        return BallReal._wrap(self.at_prec(prec).interval() * o.at_prec(prec).interval(), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.contains_zero():
            raise DivisionByZero("division by an enclosure containing zero")
        prec = max(self.prec, o.prec)
        return BallReal._wrap(self.at_prec(prec).interval() / o.at_prec(prec).interval(), prec)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        if n == 0:
            return BallReal.exact(1, self.prec)
        if n == 1:
            return self
        half = self.square() ** (n // 2)
        return half * self if n % 2 else half

    def square(self) -> "BallReal":
        """Tight square (handles the dependency x*x vs x**2)."""
        lo, hi = self.lo, self.hi
        if lo >= 0:
            out = BallReal(lo * lo, hi * hi, self.prec)
        elif hi <= 0:
            out = BallReal(hi * hi, lo * lo, self.prec)
        else:
            out = BallReal(Fraction(0), max(lo * lo, hi * hi), self.prec)
        return out._shorten()

    def _shorten(self) -> "BallReal":
        """Outward-round endpoints back to ~prec-bit mantissas."""
        bits = self.prec + 8
        if (self.lo.numerator.bit_length() <= bits + 8
                and self.hi.numerator.bit_length() <= bits + 8):
            return self
        return BallReal(_round_dyadic(self.lo, bits, up=False),
                        _round_dyadic(self.hi, bits, up=True), self.prec)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return BallReal(Fraction(0), max(-self.lo, self.hi), self.prec)

    def sqrt(self) -> "BallReal":
        if self.lo < 0:
            raise ValidationError("sqrt of an enclosure reaching below zero")
        return BallReal._wrap(_ctx(self.prec).sqrt(self.interval()), self.prec)

    def log(self) -> "BallReal":
        if self.lo <= 0:
            raise ValidationError("log of an enclosure reaching zero")
        return BallReal._wrap(_ctx(self.prec).log(self.interval()), self.prec)

    def exp(self) -> "BallReal":
        return BallReal._wrap(_ctx(self.prec).exp(self.interval()), self.prec)

    def root(self, d: int) -> "BallReal":
        """d-th root of a positive enclosure, via exp(log/d)."""
        if d == 1:
            return self
        return (self.log() / BallReal.exact(d, self.prec)).exp()

    def scale2(self, k: int) -> "BallReal":
        """Exact multiplication by 2**k."""
        f = _TWO ** k
        return BallReal(self.lo * f, self.hi * f, self.prec)

    # -- predicates ------------------------------------------------------------

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains(self, value) -> bool:
        if isinstance(value, BallReal):
            return self.lo <= value.lo and value.hi <= self.hi
        fr = Fraction(value)
        return self.lo <= fr <= self.hi

    def intersects(self, other: "BallReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "BallReal") -> "BallReal":
        if not self.intersects(other):
            raise ValidationError("intersection of disjoint enclosures")
        return BallReal(max(self.lo, other.lo), min(self.hi, other.hi),
                        max(self.prec, other.prec))

    def sign(self):
        """-1, 0 (exact zero ball only) or +1; None if undecided."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def compare(self, other):
        """-1/0/+1 against a ball or rational; None when enclosures overlap."""
        o = self._coerce(other)
        if self.hi < o.lo:
            return -1
        if self.lo > o.hi:
            return 1
        if self.lo == self.hi == o.lo == o.hi:
            return 0
        return None

    def __repr__(self):
        return f"BallReal(mid={float(self.mid):.17g}, rad={float(self.rad):.3g}, prec={self.prec})"


class BallComplex:
    """Rectangle enclosure re + i*im of two BallReal."""

    __slots__ = ("re", "im")

    def __init__(self, re: BallReal, im: BallReal):
        self.re = re
        self.im = im

    @classmethod
    def from_real(cls, re: BallReal) -> "BallComplex":
        return cls(re, BallReal.exact(0, re.prec))

    @classmethod
    def exact(cls, re, im=0, prec: int = 53) -> "BallComplex":
        return cls(BallReal.from_fraction(re, prec), BallReal.from_fraction(im, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def _coerce(self, other):
        if isinstance(other, BallComplex):
            return other
        if isinstance(other, BallReal):
            return BallComplex.from_real(other)
        if isinstance(other, (int, Fraction)):
            return BallComplex.exact(other, 0, self.prec)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BallComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return BallComplex(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BallComplex(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.abs2()
        if den.contains_zero():
            raise DivisionByZero("division by an enclosure containing zero")
        num = self * o.conj()
        return BallComplex(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return BallComplex.exact(1, 0, self.prec) / (self ** (-n))
        result = BallComplex.exact(1, 0, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self) -> "BallComplex":
        return BallComplex(self.re, -self.im)

    def abs2(self) -> BallReal:
        return self.re.square() + self.im.square()

    def __abs__(self) -> BallReal:
        return self.abs2().sqrt()

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def is_exact_real(self) -> bool:
        return self.im.lo == self.im.hi == 0

    def __repr__(self):
        return f"BallComplex(re={self.re!r}, im={self.im!r})"
