"""Exact arithmetic in Q(beta): polynomial coordinates mod the minimal
polynomial.

A :class:`FieldElem` is a vector of Fractions (c_0, ..., c_{d-1})
representing c_0 + c_1*beta + ... over the integer minimal polynomial of
beta (low degree first, primitive).  Multiplication reduces modulo the
minimal polynomial; inversion runs the extended Euclidean algorithm over
Q[X], which always succeeds for nonzero elements because the modulus is
irreducible.  Everything here is exact -- no enclosures, no rounding --
which is what makes zero tests and telescoping identities trustworthy.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import DivisionByZero, ValidationError


def _trim(coeffs):
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_divmod(num, den):
    """Quotient and remainder in Q[X]; inputs/outputs are Fraction lists."""
    num = num[:]
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    inv_lead = 1 / den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1] * inv_lead
        if c:
            q[shift] = c
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    return _trim(q), _trim(num[:len(den) - 1])


class FieldElem:
    """One element of Q(beta), exact."""

    __slots__ = ("minpoly", "coords")

    def __init__(self, minpoly, coords):
        self.minpoly = tuple(int(c) for c in minpoly)
        d = len(self.minpoly) - 1
        coords = [Fraction(c) for c in coords]
        if len(coords) > d:
            raise ValidationError("coordinate vector longer than the degree")
        coords += [Fraction(0)] * (d - len(coords))
        self.coords = tuple(coords)

    # -- constructors --------------------------------------------------------

    @classmethod
    def of(cls, minpoly, value) -> "FieldElem":
        return cls(minpoly, (Fraction(value),))

    @classmethod
    def generator(cls, minpoly) -> "FieldElem":
        if len(minpoly) == 2:
            # degree 1: the generator is itself rational
            return cls(minpoly, (Fraction(-minpoly[0], minpoly[1]),))
        return cls(minpoly, (0, 1))

    # -- views ----------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def rational(self):
        """The exact Fraction when the element is rational, else None."""
        if all(c == 0 for c in self.coords[1:]):
            return self.coords[0]
        return None

    def __repr__(self):
        return f"FieldElem({list(self.coords)})"

    # -- ring operations --------------------------------------------------------

    def _match(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.minpoly != self.minpoly:
                raise ValidationError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElem.of(self.minpoly, other)
        return NotImplemented

    def __eq__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    __hash__ = None

    def __add__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.minpoly,
                         [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.minpoly, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        d = self.degree
        prod = [Fraction(0)] * (2 * d - 1 if d > 1 else 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        _, rem = _poly_divmod(prod, [Fraction(c) for c in self.minpoly])
        return FieldElem(self.minpoly, rem)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in Q(beta)")
        r = self.rational()
        if r is not None:
            return FieldElem.of(self.minpoly, 1 / r)
        # extended Euclid: s*self + t*minpoly = gcd = constant
        a = [Fraction(c) for c in self.minpoly]
        b = _trim(list(self.coords))
        s_a, s_b = [], [Fraction(1)]  # coefficients of self in a, b
        while b:
            q, r = _poly_divmod(a, b)
            # s_r = s_a - q*s_b
            s_r = s_a[:] + [Fraction(0)] * max(0, len(q) + len(s_b) - 1 - len(s_a))
            for i, qc in enumerate(q):
                if qc:
                    for j, sc in enumerate(s_b):
                        s_r[i + j] -= qc * sc
            a, b, s_a, s_b = b, r, s_b, _trim(s_r)
        if len(a) != 1:
            raise ValidationError("minimal polynomial is not irreducible")
        g = a[0]
        return FieldElem(self.minpoly, [c / g for c in s_a])

    def __truediv__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._match(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def pow(self, n: int) -> "FieldElem":
        if n < 0:
            return self.inverse().pow(-n)
        result = FieldElem.of(self.minpoly, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    __pow__ = pow
