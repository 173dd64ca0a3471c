"""Exact algebraic numbers: integer minimal polynomial + isolating box.

Representation
--------------
``coeffs``  integer tuple ``(c0, ..., cd)`` (ascending), content-free,
            squarefree/irreducible, positive leading coefficient.
``box``     rational rectangle ``(relo, rehi, imlo, imhi)`` containing exactly
            one root of the polynomial -- the value.  Real values keep
            ``imlo == imhi == 0`` as an invariant.

Rationals are degree-1 instances and all operations shortcut through
``Fraction`` arithmetic for them.  Sums/products of two irrational values go
through integer resultants; the correct irreducible factor of the resultant is
selected by shrinking certified enclosures of the operands until exactly one
factor has a root in the combined enclosure (root counts are exact, via Sturm
sequences / winding numbers on rational rectangles).  Affine maps a*x + b with
rational a, b transform the minimal polynomial directly and never factor.

Refinement uses a fast integer-square-root path for degrees 1 and 2 and
mpmath root approximation certified by exact root counting above that, with an
exact bisection/quadtree fallback.  Boxes only ever shrink.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from math import isqrt

import sympy

from ..errors import (
    Indeterminate,
    IsolatorInvalid,
    ParseError,
    PrecisionExhausted,
    SturmlabError,
    ValidationError,
)
from .ball import BallComplex, BallReal, _from_raw_exact as _fraction_of_raw, \
    _round_dyadic

_X = sympy.Symbol("x")

DEFAULT_DEGREE_CAP = 64


class DegreeCapExceeded(SturmlabError):
    """Raised internally when a product of degrees passes the cap; callers
    catch it and degrade to ball arithmetic (see kernel.ops)."""


def _normalize(coeffs):
    """Strip trailing zeros, divide by content, make leading coeff > 0."""
    cs = [int(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValidationError("zero polynomial")
    from math import gcd
    g = 0
    for c in cs:
        g = gcd(g, c)
    cs = [c // g for c in cs]
    if cs[-1] < 0:
        cs = [-c for c in cs]
    return tuple(cs)


def _poly(coeffs):
    return sympy.Poly(list(reversed(coeffs)), _X)


def _count_real(coeffs, lo: Fraction, hi: Fraction) -> int:
    return _poly(coeffs).count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                     sympy.Rational(hi.numerator, hi.denominator))


def _count_poly_rect(f, relo, rehi, imlo, imhi) -> int:
    """Exact root count of a sympy Poly in a closed rectangle.

    sympy's winding-number traversal cannot handle roots sitting exactly on
    an edge or corner; on that failure the rectangle is inflated by a tiny
    irregular amount (outward only, so containment is preserved) and the
    count retried.
    """
    pad = (max(rehi - relo, imhi - imlo) or Fraction(1)) / Fraction(1 << 16)
    for _attempt in range(8):
        inf = sympy.Rational(relo.numerator, relo.denominator) \
            + sympy.I * sympy.Rational(imlo.numerator, imlo.denominator)
        sup = sympy.Rational(rehi.numerator, rehi.denominator) \
            + sympy.I * sympy.Rational(imhi.numerator, imhi.denominator)
        try:
            return f.count_roots(inf, sup)
        except NotImplementedError:
            relo, rehi = relo - pad, rehi + pad
            imlo, imhi = imlo - pad, imhi + pad
            pad *= Fraction(13, 2)
    raise Indeterminate("complex root counting failed on inflated rectangles")


def _count_rect(coeffs, relo, rehi, imlo, imhi) -> int:
    return _count_poly_rect(_poly(coeffs), relo, rehi, imlo, imhi)


def _eval_sign(coeffs, point: Fraction) -> int:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * point + c
    return (acc > 0) - (acc < 0)


def _select_factor(factors, z, value_is_real):
    """Pick the unique resultant factor with a root in enclosure z.

    Returns the finished AlgebraicNumber, or None when the enclosure is still
    too wide to separate the candidate factors.
    """
    if value_is_real:
        lo, hi = z.re.lo, z.re.hi
        cands = [f for f in factors
                 if f.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                  sympy.Rational(hi.numerator, hi.denominator)) >= 1]
    else:
        cands = [f for f in factors
                 if _count_poly_rect(f, z.re.lo, z.re.hi, z.im.lo, z.im.hi) >= 1]
    if len(cands) != 1:
        return None
    coeffs = _normalize([int(c) for c in reversed(cands[0].all_coeffs())])
    if len(coeffs) == 2:
        return AlgebraicNumber.from_rational(Fraction(-coeffs[0], coeffs[1]))
    box = (z.re.lo, z.re.hi, z.im.lo, z.im.hi)
    if value_is_real:
        box = (box[0], box[1], Fraction(0), Fraction(0))
        if _count_real(coeffs, box[0], box[1]) == 1:
            return AlgebraicNumber(coeffs, box, True, _checked=True)
        return None
    if _count_rect(coeffs, *box) == 1:
        # a complex-op result may still be a real number
        if box[2] <= 0 <= box[3] and _count_real(coeffs, box[0], box[1]) >= 1:
            return AlgebraicNumber(coeffs, (box[0], box[1], Fraction(0), Fraction(0)),
                                   True, _checked=True)
        return AlgebraicNumber(coeffs, box, False, _checked=True)
    return None


def _sqrt_enclosure(n: int, bits: int):
    """[s, s+1]/2**bits containing sqrt(n) (n > 0, not a perfect square)."""
    s = isqrt(n << (2 * bits))
    scale = Fraction(1, 1 << bits)
    return Fraction(s) * scale, Fraction(s + 1) * scale


class AlgebraicNumber:
    __slots__ = ("coeffs", "box", "is_real", "_lit")

    __hash__ = None

    def __init__(self, coeffs, box, is_real, _checked=False):
        self.coeffs = tuple(int(c) for c in coeffs)
        self.box = tuple(Fraction(v) for v in box)
        self.is_real = bool(is_real)
        self._lit = None
        if not _checked:
            self._validate()

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "AlgebraicNumber":
        fr = Fraction(value)
        coeffs = (-fr.numerator, fr.denominator)
        return cls(coeffs, (fr, fr, Fraction(0), Fraction(0)), True, _checked=True)

    @classmethod
    def sqrt_of_rational(cls, value) -> "AlgebraicNumber":
        fr = Fraction(value)
        if fr < 0:
            raise ValidationError("sqrt_of_rational needs a nonnegative rational")
        p, q = fr.numerator, fr.denominator
        if isqrt(p) ** 2 == p and isqrt(q) ** 2 == q:
            return cls.from_rational(Fraction(isqrt(p), isqrt(q)))
        coeffs = _normalize((-p, 0, q))
        lo, hi = _sqrt_enclosure(p * q, 64)
        return cls(coeffs, (lo / q, hi / q, Fraction(0), Fraction(0)), True, _checked=True)

    @classmethod
    def from_quadratic(cls, a: int, b: int, d: int, c: int) -> "AlgebraicNumber":
        """(a + b*sqrt(d)) / c with integer a, b, c, d; c > 0, b != 0."""
        if c <= 0:
            raise ValidationError("quadratic denominator must be positive")
        if b == 0 or d == 0:
            return cls.from_rational(Fraction(a, c))
        if d > 0 and isqrt(d) ** 2 == d:
            return cls.from_rational(Fraction(a + b * isqrt(d), c))
        coeffs = _normalize((a * a - b * b * d, -2 * a * c, c * c))
        if d > 0:
            slo, shi = _sqrt_enclosure(d, 64)
            ends = [Fraction(a + b * s, c) for s in (slo, shi)]
            box = (min(ends), max(ends), Fraction(0), Fraction(0))
            return cls(coeffs, box, True, _checked=True)
        slo, shi = _sqrt_enclosure(-d, 64)
        ims = [Fraction(b * s, c) for s in (slo, shi)]
        re = Fraction(a, c)
        return cls(coeffs, (re, re, min(ims), max(ims)), False, _checked=True)

    # -- validation ---------------------------------------------------------

    def _validate(self):
        coeffs = _normalize(self.coeffs)
        if coeffs != self.coeffs:
            raise ValidationError("minimal polynomial not normalized")
        if len(coeffs) < 2:
            raise ValidationError("constant polynomial")
        relo, rehi, imlo, imhi = self.box
        if relo > rehi or imlo > imhi:
            raise IsolatorInvalid("isolating box has inverted endpoints")
        if len(coeffs) == 3:
            disc = coeffs[1] * coeffs[1] - 4 * coeffs[0] * coeffs[2]
            if disc >= 0 and isqrt(disc) ** 2 == disc:
                raise ValidationError("polynomial is reducible; pass the minimal factor")
        elif len(coeffs) > 3:
            _, factors = _poly(coeffs).factor_list()
            if len(factors) != 1 or factors[0][1] != 1:
                raise ValidationError("polynomial is reducible; pass the minimal factor")
        if self.is_real:
            if imlo != 0 or imhi != 0:
                raise IsolatorInvalid("real value with nonzero imaginary box")
            if _count_real(coeffs, relo, rehi) != 1:
                raise IsolatorInvalid("box does not isolate exactly one real root")
        else:
            if _count_rect(coeffs, relo, rehi, imlo, imhi) != 1:
                raise IsolatorInvalid("box does not isolate exactly one root")

    # -- basic views -------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValidationError("not a rational value")
        return Fraction(-self.coeffs[0], self.coeffs[1])

    def __repr__(self):
        return f"AlgebraicNumber({self.literal()})"

    # -- refinement -----------------------------------------------------------

    def _box_width(self) -> Fraction:
        relo, rehi, imlo, imhi = self.box
        return max(rehi - relo, imhi - imlo)

    def refine(self, prec: int):
        """Shrink the box and return a ball with
        rad <= 2**(1-prec) * max(1, |mid|); BallReal for real values."""
        if self.is_rational:
            fr = self.rational_value
            if fr.denominator & (fr.denominator - 1) == 0:
                return BallReal(fr, fr, prec)
            return BallReal.from_fraction(fr, prec)
        target = Fraction(1, 1 << (prec + 2))
        if self._box_width() > target:
            if self.degree == 2:
                self._refine_deg2(prec + 8)
            else:
                self._refine_general(prec + 8)
        relo, rehi, imlo, imhi = self.box
        re = BallReal(_round_dyadic(relo, prec + 16, up=False),
                      _round_dyadic(rehi, prec + 16, up=True), prec)
        if self.is_real:
            return re
        im = BallReal(_round_dyadic(imlo, prec + 16, up=False),
                      _round_dyadic(imhi, prec + 16, up=True), prec)
        return BallComplex(re, im)

    def refine_rect(self, prec: int) -> BallComplex:
        b = self.refine(prec)
        return BallComplex.from_real(b) if isinstance(b, BallReal) else b

    def to_ball(self, prec: int):
        return self.refine(prec)

    def _refine_deg2(self, bits: int):
        c0, c1, c2 = self.coeffs
        disc = c1 * c1 - 4 * c0 * c2
        relo, rehi, imlo, imhi = self.box
        k = bits + max(abs(c2).bit_length(), 4)
        if disc > 0:
            slo, shi = _sqrt_enclosure(disc, k)
            cands = []
            for sgn in (1, -1):
                ends = [Fraction(-c1 + sgn * s, 2 * c2) for s in (slo, shi)]
                cands.append((min(ends), max(ends)))
            hits = [(lo, hi) for lo, hi in cands if lo <= rehi and relo <= hi]
            if len(hits) != 1:
                # candidates poke across the box edge; more bits separate them
                return self._refine_deg2(2 * bits)
            lo, hi = hits[0]
            self.box = (max(lo, relo), min(hi, rehi), Fraction(0), Fraction(0))
        else:
            re = Fraction(-c1, 2 * c2)
            slo, shi = _sqrt_enclosure(-disc, k)
            cands = []
            for sgn in (1, -1):
                ends = [Fraction(sgn * s, 2 * c2) for s in (slo, shi)]
                cands.append((min(ends), max(ends)))
            hits = [(lo, hi) for lo, hi in cands if lo <= imhi and imlo <= hi]
            if len(hits) != 1:
                return self._refine_deg2(2 * bits)
            lo, hi = hits[0]
            # pad the exact real part so rectangle edges avoid the root;
            # the conjugate stays excluded by the sign-definite im interval
            pad = Fraction(1, 1 << (bits + 2))
            self.box = (re - pad, re + pad, max(lo, imlo), min(hi, imhi))

    def _refine_general(self, bits: int):
        import mpmath
        from mpmath import libmp

        target = Fraction(1, 1 << bits)
        poly_coeffs = list(reversed(self.coeffs))
        wp = bits + 32
        for attempt in range(3):
            try:
                with mpmath.workprec(wp):
                    roots = mpmath.polyroots(poly_coeffs, maxsteps=200, extraprec=wp)
            except (mpmath.libmp.NoConvergence, ZeroDivisionError):
                wp *= 2
                continue
            relo, rehi, imlo, imhi = self.box
            slack = Fraction(rehi - relo + imhi - imlo) / 4 + Fraction(1, 1 << 20)
            cands = []
            for z in roots:
                zre = _fraction_of_raw(mpmath.re(z)._mpf_)
                zim = _fraction_of_raw(mpmath.im(z)._mpf_)
                if (relo - slack <= zre <= rehi + slack
                        and imlo - slack <= zim <= imhi + slack):
                    cands.append((zre, zim))
            if len(cands) == 1:
                zre, zim = cands[0]
                r = target / 4
                for widen in range(6):
                    nrelo = max(relo, _round_dyadic(zre - r, bits + 8, up=False))
                    nrehi = min(rehi, _round_dyadic(zre + r, bits + 8, up=True))
                    nimlo = max(imlo, _round_dyadic(zim - r, bits + 8, up=False))
                    nimhi = min(imhi, _round_dyadic(zim + r, bits + 8, up=True))
                    if self.is_real:
                        nimlo = nimhi = Fraction(0)
                    if nrelo <= nrehi and nimlo <= nimhi:
                        if self.is_real:
                            ok = _count_real(self.coeffs, nrelo, nrehi) == 1
                        else:
                            ok = _count_rect(self.coeffs, nrelo, nrehi, nimlo, nimhi) == 1
                        if ok:
                            self.box = (nrelo, nrehi, nimlo, nimhi)
                            if max(nrehi - nrelo, nimhi - nimlo) <= target:
                                return
                            break
                    r *= 16
                else:
                    break
                if self._box_width() <= target:
                    return
            wp *= 2
        self._refine_bisect(target)

    def _refine_bisect(self, target: Fraction):
        if self.is_real:
            lo, hi = self.box[0], self.box[1]
            slo = _eval_sign(self.coeffs, lo)
            if slo == 0:  # rational endpoint equal to the root: impossible
                raise IsolatorInvalid("root at box endpoint")
            while hi - lo > target:
                mid = (lo + hi) / 2
                sm = _eval_sign(self.coeffs, mid)
                if sm == 0:
                    raise IsolatorInvalid("root at bisection point")
                if sm == slo:
                    lo = mid
                else:
                    hi = mid
            self.box = (lo, hi, Fraction(0), Fraction(0))
            return
        relo, rehi, imlo, imhi = self.box
        while max(rehi - relo, imhi - imlo) > target:
            if rehi - relo >= imhi - imlo:
                for num in (1, 17, 15):  # fractions of 2/32 around the midpoint
                    mid = relo + (rehi - relo) * Fraction(num, 2 if num == 1 else 32)
                    left = _count_rect(self.coeffs, relo, mid, imlo, imhi)
                    right = _count_rect(self.coeffs, mid, rehi, imlo, imhi)
                    if left + right == 1:
                        if left:
                            rehi = mid
                        else:
                            relo = mid
                        break
                else:
                    raise Indeterminate("complex bisection failed to separate")
            else:
                for num in (1, 17, 15):
                    mid = imlo + (imhi - imlo) * Fraction(num, 2 if num == 1 else 32)
                    low = _count_rect(self.coeffs, relo, rehi, imlo, mid)
                    high = _count_rect(self.coeffs, relo, rehi, mid, imhi)
                    if low + high == 1:
                        if low:
                            imhi = mid
                        else:
                            imlo = mid
                        break
                else:
                    raise Indeterminate("complex bisection failed to separate")
        self.box = (relo, rehi, imlo, imhi)

    # -- exact decisions ----------------------------------------------------

    def sign_exact(self, prec_ceiling: int = 1 << 20) -> int:
        if not self.is_real:
            raise ValidationError("sign of a non-real value")
        if self.is_rational:
            v = self.rational_value
            return (v > 0) - (v < 0)
        prec = 32
        while prec <= prec_ceiling:
            b = self.refine(prec)
            s = b.sign()
            if s is not None:
                return s
            prec *= 2
        raise PrecisionExhausted("sign undecided at precision ceiling")

    def floor_exact(self, prec_ceiling: int = 1 << 20) -> int:
        if not self.is_real:
            raise ValidationError("floor of a non-real value")
        if self.is_rational:
            v = self.rational_value
            return v.numerator // v.denominator
        prec = 32
        while prec <= prec_ceiling:
            b = self.refine(prec)
            klo = b.lo.numerator // b.lo.denominator
            khi = b.hi.numerator // b.hi.denominator
            if klo == khi:
                return klo
            prec *= 2
        raise PrecisionExhausted("floor undecided at precision ceiling")

    # -- arithmetic -----------------------------------------------------------

    def affine(self, a, b) -> "AlgebraicNumber":
        """a*self + b for rational a != 0, b; no factorization involved."""
        a = Fraction(a)
        b = Fraction(b)
        if a == 0:
            raise ValidationError("affine scale must be nonzero")
        if self.is_rational:
            return AlgebraicNumber.from_rational(a * self.rational_value + b)
        # compose p((X-b)/a) via Horner over Fraction polynomials
        acc = [Fraction(0)]
        lin = (Fraction(-b) / a, Fraction(1) / a)  # (X - b)/a
        for c in reversed(self.coeffs):
            nxt = [Fraction(0)] * (len(acc) + 1)
            for i, v in enumerate(acc):
                nxt[i] += v * lin[0]
                nxt[i + 1] += v * lin[1]
            while len(nxt) > 1 and nxt[-1] == 0:
                nxt.pop()
            nxt[0] += c
            acc = nxt
        from math import lcm
        den = 1
        for v in acc:
            den = lcm(den, v.denominator)
        coeffs = _normalize([int(v * den) for v in acc])
        relo, rehi, imlo, imhi = self.box
        res = [a * relo + b, a * rehi + b]
        ims = [a * imlo, a * imhi]
        box = (min(res), max(res), min(ims), max(ims))
        return AlgebraicNumber(coeffs, box, self.is_real, _checked=True)

    def __neg__(self):
        return self.affine(-1, 0)

    def conj(self) -> "AlgebraicNumber":
        if self.is_real:
            return self
        relo, rehi, imlo, imhi = self.box
        return AlgebraicNumber(self.coeffs, (relo, rehi, -imhi, -imlo), False,
                               _checked=True)

    def inverse(self) -> "AlgebraicNumber":
        if self.is_rational:
            v = self.rational_value
            if v == 0:
                raise ValidationError("inverse of zero")
            return AlgebraicNumber.from_rational(1 / v)
        coeffs = _normalize(tuple(reversed(self.coeffs)))
        prec = 64
        while True:
            z = self.refine_rect(prec)
            try:
                w = BallComplex.exact(1, 0, prec) / z
            except DivisionByZero:
                prec *= 2
                continue
            box = (w.re.lo, w.re.hi, w.im.lo, w.im.hi)
            if self.is_real:
                box = (box[0], box[1], Fraction(0), Fraction(0))
                if _count_real(coeffs, box[0], box[1]) == 1:
                    return AlgebraicNumber(coeffs, box, True, _checked=True)
            elif _count_rect(coeffs, *box) == 1:
                return AlgebraicNumber(coeffs, box, False, _checked=True)
            prec *= 2
            if prec > (1 << 20):
                raise PrecisionExhausted("inverse isolation failed")

    def _binary(self, other, kind: str, cap: int):
        """Resultant-based sum/product with certified factor selection."""
        dp, dq = self.degree, other.degree
        if dp * dq > cap:
            raise DegreeCapExceeded(f"degree {dp}*{dq} exceeds cap {cap}")
        y = sympy.Symbol("y")
        p_expr = sum(c * y ** i for i, c in enumerate(self.coeffs))
        if kind == "add":
            q_expr = sum(c * (_X - y) ** i for i, c in enumerate(other.coeffs))
        else:
            m = other.degree
            q_expr = sum(c * _X ** i * y ** (m - i) for i, c in enumerate(other.coeffs))
        res = sympy.resultant(sympy.expand(p_expr), sympy.expand(q_expr), y)
        rpoly = sympy.Poly(sympy.expand(res), _X)
        factors = [f for f, _mult in rpoly.factor_list()[1]]
        both_real = self.is_real and other.is_real
        prec = 96
        while True:
            za = self.refine_rect(prec)
            zb = other.refine_rect(prec)
            z = za + zb if kind == "add" else za * zb
            result = _select_factor(factors, z, both_real)
            if result is not None:
                return result
            prec *= 2
            if prec > (1 << 20):
                raise PrecisionExhausted("factor selection failed")

    def add(self, other, cap: int = DEFAULT_DEGREE_CAP) -> "AlgebraicNumber":
        other = _coerce(other)
        if self.is_rational:
            return (other.affine(1, self.rational_value) if not other.is_rational
                    else AlgebraicNumber.from_rational(
                        self.rational_value + other.rational_value))
        if other.is_rational:
            return self.affine(1, other.rational_value)
        return self._binary(other, "add", cap)

    def mul(self, other, cap: int = DEFAULT_DEGREE_CAP) -> "AlgebraicNumber":
        other = _coerce(other)
        if self.is_rational:
            v = self.rational_value
            if v == 0:
                return AlgebraicNumber.from_rational(0)
            return (other.affine(v, 0) if not other.is_rational
                    else AlgebraicNumber.from_rational(v * other.rational_value))
        if other.is_rational:
            v = other.rational_value
            if v == 0:
                return AlgebraicNumber.from_rational(0)
            return self.affine(v, 0)
        return self._binary(other, "mul", cap)

    def __add__(self, other):
        try:
            return self.add(other)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return self.add(o.affine(-1, 0) if not o.is_rational
                        else AlgebraicNumber.from_rational(-o.rational_value))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        try:
            return self.mul(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.mul(_coerce(other).inverse())

    def __rtruediv__(self, other):
        return _coerce(other).mul(self.inverse())

    def pow(self, n: int, cap: int = DEFAULT_DEGREE_CAP) -> "AlgebraicNumber":
        if n == 0:
            return AlgebraicNumber.from_rational(1)
        if n < 0:
            return self.inverse().pow(-n, cap)
        if n == 1:
            return self
        if self.is_rational:
            return AlgebraicNumber.from_rational(self.rational_value ** n)
        y = sympy.Symbol("y")
        p_expr = sum(c * y ** i for i, c in enumerate(self.coeffs))
        res = sympy.resultant(sympy.expand(p_expr), _X - y ** n, y)
        factors = [f for f, _m in sympy.Poly(sympy.expand(res), _X).factor_list()[1]]
        prec = 96
        while True:
            z = self.refine_rect(prec) ** n
            result = _select_factor(factors, z, self.is_real)
            if result is not None:
                return result
            prec *= 2
            if prec > (1 << 20):
                raise PrecisionExhausted("power isolation failed")

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return self.pow(n)

    def __eq__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_rational and o.is_rational:
            return self.rational_value == o.rational_value
        if self.is_rational != o.is_rational:
            return False
        if self.coeffs != o.coeffs:
            return False
        if self.is_real != o.is_real:
            return False
        diff = self - o
        if diff.is_rational:
            return diff.rational_value == 0
        return False

    def is_zero(self) -> bool:
        return self.is_rational and self.rational_value == 0

    # -- printing / parsing ------------------------------------------------------

    def _scaled_floor(self, axis: int, p: int) -> int:
        """floor(2**p * (re or im of self)), independent of the stored box.

        axis 0 is the real part, 1 the imaginary part.  Exact for every real
        value and for degree-2 complex values (where re is rational and im is
        sqrt(positive rational)); higher-degree complex parts fall back to box
        refinement, which resolves unless the part lies exactly on the scaled
        grid.
        """
        sc = 1 << p
        if self.is_real:
            return self.affine(sc, 0).floor_exact()
        if len(self.coeffs) == 3:
            c0, c1, c2 = self.coeffs
            if axis == 0:
                re = Fraction(-c1, 2 * c2)
                return (re.numerator * sc) // re.denominator
            disc4 = 4 * c0 * c2 - c1 * c1  # -(discriminant) > 0
            sgn = 1 if self.box[2] >= 0 else -1
            s = isqrt(disc4)
            if s * s == disc4:
                im = Fraction(sgn * s, 2 * c2)
                return (im.numerator * sc) // im.denominator
            # floor(sqrt(num/den)) = isqrt(num*den)//den, exact in integers
            num, den = disc4 * sc * sc, 4 * c2 * c2
            f = isqrt(num * den) // den
            return f if sgn > 0 else -f - 1
        prec = p + 48
        while prec <= (1 << 20):
            self.refine(prec)
            lo, hi = self.box[2 * axis], self.box[2 * axis + 1]
            flo = (lo.numerator * sc) // lo.denominator
            fhi = (hi.numerator * sc) // hi.denominator
            if flo == fhi:
                return flo
            prec *= 2
        raise PrecisionExhausted(
            f"cannot place component {axis} on the 2^-{p} grid")

    def _canonical_cells(self):
        """Printing box: the dyadic grid cell(s) containing the value.

        Depends only on the value (via exact scaled floors), never on the
        refinement state of the stored box, so the literal form is stable.
        The grid is refined until the cell isolates the root.
        """
        p = 72
        for _ in range(8):
            sc = 1 << p
            cre = self._scaled_floor(0, p)
            relo, rehi = Fraction(cre, sc), Fraction(cre + 1, sc)
            if self.is_real:
                if _count_real(self.coeffs, relo, rehi) == 1:
                    return relo, rehi, Fraction(0), Fraction(0)
            else:
                cim = self._scaled_floor(1, p)
                imlo, imhi = Fraction(cim, sc), Fraction(cim + 1, sc)
                if _count_rect(self.coeffs, relo, rehi, imlo, imhi) == 1:
                    return relo, rehi, imlo, imhi
            p += 32
        raise PrecisionExhausted("canonical printing cell never isolated")

    def literal(self) -> str:
        if self.is_rational:
            v = self.rational_value
            return f"rat:{v.numerator}" if v.denominator == 1 \
                else f"rat:{v.numerator}/{v.denominator}"
        if self._lit is None:
            relo, rehi, imlo, imhi = self._canonical_cells()
            cs = ",".join(str(c) for c in self.coeffs)
            if self.is_real:
                self._lit = f"alg:{cs}@[{_fr(relo)},{_fr(rehi)}]"
            else:
                self._lit = (f"alg:{cs}@[{_fr(relo)},{_fr(rehi)}]"
                             f"x[{_fr(imlo)},{_fr(imhi)}]")
        return self._lit


def _fr(fr: Fraction) -> str:
    return str(fr.numerator) if fr.denominator == 1 \
        else f"{fr.numerator}/{fr.denominator}"


def _coerce(value) -> AlgebraicNumber:
    if isinstance(value, AlgebraicNumber):
        return value
    if isinstance(value, (int, Fraction)):
        return AlgebraicNumber.from_rational(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to AlgebraicNumber")


_QUAD_RE = _re.compile(
    r"^\((-?\d+)([+-]\d+)\*sqrt\((-?\d+)\)\)/(\d+)$")
_BOX_RE = _re.compile(
    r"^\[([^,\]]+),([^,\]]+)\](?:x\[([^,\]]+),([^,\]]+)\])?$")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def parse_value(text: str):
    """Parse a value literal: rat:, quad:, or alg: forms.

    Returns a Fraction for rat: and an AlgebraicNumber otherwise.
    """
    text = text.strip()
    if text.startswith("rat:"):
        return _parse_fraction(text[4:])
    if text.startswith("quad:"):
        m = _QUAD_RE.match(text[5:])
        if not m:
            raise ParseError(f"bad quadratic literal {text!r}; "
                             "expected quad:(a+b*sqrt(d))/c")
        a, b, d, c = (int(m.group(i)) for i in range(1, 5))
        if c == 0:
            raise ParseError("quadratic denominator is zero")
        if b == 0:
            raise ParseError("quadratic with b=0; use rat:")
        if d > 0 and isqrt(d) ** 2 == d:
            raise ParseError("sqrt of a perfect square; use rat:")
        if d == 0:
            raise ParseError("sqrt(0); use rat:")
        return AlgebraicNumber.from_quadratic(a, b, d, c)
    if text.startswith("alg:"):
        body = text[4:]
        if "@" not in body:
            raise ParseError("alg: literal needs @[lo,hi] isolator")
        cs_text, box_text = body.split("@", 1)
        try:
            coeffs = [int(c) for c in cs_text.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad coefficient list: {exc}") from None
        m = _BOX_RE.match(box_text.strip())
        if not m:
            raise ParseError(f"bad isolator {box_text!r}")
        relo, rehi = _parse_fraction(m.group(1)), _parse_fraction(m.group(2))
        if m.group(3) is not None:
            imlo, imhi = _parse_fraction(m.group(3)), _parse_fraction(m.group(4))
        else:
            imlo = imhi = Fraction(0)
        try:
            coeffs = _normalize(coeffs)
        except ValidationError as exc:
            raise ParseError(str(exc)) from None
        if len(coeffs) < 2:
            raise ParseError("constant polynomial")
        if len(coeffs) == 2:
            value = Fraction(-coeffs[0], coeffs[1])
            if not (relo <= value <= rehi and imlo <= 0 <= imhi):
                raise IsolatorInvalid("isolator excludes the rational root")
            return AlgebraicNumber.from_rational(value)
        is_real = imlo == imhi == 0
        try:
            return AlgebraicNumber(coeffs, (relo, rehi, imlo, imhi), is_real)
        except ValidationError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"unknown value literal {text!r}; "
                     "expected rat:, quad:, or alg: prefix")


def format_value(value) -> str:
    """Canonical literal for a Fraction/int/AlgebraicNumber."""
    if isinstance(value, AlgebraicNumber):
        return value.literal()
    fr = Fraction(value)
    return f"rat:{fr.numerator}" if fr.denominator == 1 \
        else f"rat:{fr.numerator}/{fr.denominator}"
