"""Multiplicative Weil heights and the sparse-gap splitting test.

All heights here are the absolute multiplicative kind, normalized by degree:
for reduced p/q the height is max(|p|, |q|), and for an algebraic number of
degree d with primitive minimal polynomial a_d X^d + ... + a_0 it is the d-th
root of the Mahler measure |a_d| * prod max(1, |root|).  The two agree on
rationals, which the tests pin down.  Vector heights are restricted to
rational coordinates: clear denominators, divide out the gcd, take the max
absolute entry.

The gap test asks, for a sparse polynomial f whose exponents avoid the open
interval (d0, d1), whether d1 - d0 > log(k*H(f)) / log H(beta) with k+1 the
number of terms.  When it does, any root beta of f (with H(beta) > 1, beta
not a root of unity) must already be a common root of the low part (degrees
<= d0) and the high part (degrees >= d1) separately; root membership is
decided exactly through minimal-polynomial divisibility, never numerically.
Both logarithms are natural (the ratio is base-independent).  The comparison
is decided only when a certified enclosure of the ratio excludes the integer
gap -- with one exception that needs no enclosure at all: when k*H(f) and
H(beta) are integer powers of a common base, the ratio is an exact rational
and the verdict is immediate.  Otherwise the report carries ``None`` for the
boolean rather than a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy import QQ, ZZ
from sympy import Poly as _Poly
from sympy import integer_nthroot

from .errors import (
    BadSplit,
    ConstantPolynomial,
    HeightOne,
    ParseError,
    PrecisionExhausted,
    RootOfUnity,
    ValidationError,
    ZeroVector,
)
from .kernel import DEFAULT_PREC, AlgebraicNumber, BallReal

_X = sympy.Symbol("x")

HEIGHT_CONVENTION = "absolute multiplicative height, degree-normalized"

_EPS_CEILING = 1 << 15  # hard stop for root-isolation refinement


# ---------------------------------------------------------------------------
# sparse polynomials


@dataclass(frozen=True)
class SparsePolynomial:
    """Integer polynomial stored as (exponent, coefficient) pairs.

    Exponents are nonnegative, strictly increasing; coefficients nonzero.
    """

    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("polynomial needs at least one term")
        prev = -1
        for exp, coeff in self.terms:
            if not isinstance(exp, int) or isinstance(exp, bool) or exp < 0:
                raise ValidationError(f"bad exponent {exp!r}")
            if not isinstance(coeff, int) or isinstance(coeff, bool):
                raise ValidationError(f"bad coefficient {coeff!r}")
            if coeff == 0:
                raise ValidationError(f"zero coefficient at X^{exp}")
            if exp <= prev:
                raise ValidationError("exponents must strictly increase")
            prev = exp

    @classmethod
    def from_pairs(cls, pairs) -> "SparsePolynomial":
        """Build from (exponent, coefficient) pairs in any order.

        Duplicate exponents are rejected rather than merged, so a typo in a
        CLI literal cannot silently change the polynomial.
        """
        pairs = [(int(e), int(c)) for e, c in pairs]
        exps = [e for e, _ in pairs]
        if len(set(exps)) != len(exps):
            raise ValidationError("duplicate exponents")
        return cls(tuple(sorted(pairs)))

    @property
    def degree(self) -> int:
        return self.terms[-1][0]

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __len__(self) -> int:
        return len(self.terms)

    def coefficients(self) -> tuple:
        """Nonzero coefficients in exponent order."""
        return tuple(c for _, c in self.terms)

    def split(self, d0: int, d1: int):
        """Low part (degrees <= d0) and high part (degrees >= d1).

        Either part may come back ``None`` when no term lands in it.  A term
        strictly inside the open gap (d0, d1) raises :class:`BadSplit`.
        """
        if d0 >= d1:
            raise ValidationError(f"need d0 < d1, got ({d0}, {d1})")
        low = [t for t in self.terms if t[0] <= d0]
        high = [t for t in self.terms if t[0] >= d1]
        stray = [e for e, _ in self.terms if d0 < e < d1]
        if stray:
            raise BadSplit(f"term X^{stray[0]} lies in the open gap ({d0}, {d1})")
        return (SparsePolynomial(tuple(low)) if low else None,
                SparsePolynomial(tuple(high)) if high else None)

    def eval_fraction(self, value) -> Fraction:
        v = Fraction(value)
        return sum((Fraction(c) * v ** e for e, c in self.terms), Fraction(0))

    def as_sympy(self) -> _Poly:
        return _Poly(dict(self.terms), _X, domain=ZZ)

    def literal(self) -> str:
        return "poly:" + ",".join(f"{e}:{c}" for e, c in self.terms)

    def __str__(self) -> str:
        def mono(e, c):
            if e == 0:
                return str(c)
            head = "" if c == 1 else "-" if c == -1 else str(c)
            return f"{head}X" if e == 1 else f"{head}X^{e}"

        out = " + ".join(mono(e, c) for e, c in reversed(self.terms))
        return out.replace("+ -", "- ")


def parse_poly(text: str) -> SparsePolynomial:
    """Parse the CLI literal ``poly:e1:c1,e2:c2,...``."""
    if not text.startswith("poly:"):
        raise ParseError(f"expected a poly: literal, got {text!r}")
    body = text[len("poly:"):]
    pairs = []
    for chunk in body.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ParseError(f"malformed term {chunk!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"malformed term {chunk!r}") from None
    return SparsePolynomial.from_pairs(pairs)


# ---------------------------------------------------------------------------
# vector and polynomial heights


def height_int_vector(v) -> int:
    """Projective height of a rational-coordinate vector.

    Clears denominators, divides by the gcd, returns the maximum absolute
    entry.  Pre: len(v) >= 2 (a single coordinate has no projective
    content); not all zero.
    """
    coords = [Fraction(c) for c in v]
    if len(coords) < 2:
        raise ValidationError("projective height needs at least 2 coordinates")
    if all(c == 0 for c in coords):
        raise ZeroVector("height of the zero vector is undefined")
    scale = math.lcm(*(c.denominator for c in coords))
    ints = [int(c * scale) for c in coords]
    g = math.gcd(*ints)
    return max(abs(n) for n in ints) // g


def poly_height(f: SparsePolynomial) -> int:
    """Height of a nonconstant integer polynomial: gcd-free max |coefficient|."""
    if f.is_constant:
        raise ConstantPolynomial(f"height of constant {f} is not defined here")
    coeffs = list(f.coefficients())
    if len(coeffs) == 1:
        coeffs.append(0)  # stand-in for any of the zero coefficients
    return height_int_vector(coeffs)


# ---------------------------------------------------------------------------
# heights of algebraic numbers


def _coerce_alg(x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return AlgebraicNumber.from_rational(x)
    raise ValidationError(f"expected an algebraic number, got {type(x).__name__}")


def _hull(a: Fraction, b: Fraction, prec: int) -> BallReal:
    """Enclosure of the closed interval [a, b] with rational endpoints."""
    return BallReal.hull_of(BallReal.from_fraction(a, prec),
                            BallReal.from_fraction(b, prec))


def _max_one(b: BallReal) -> BallReal:
    if b.hi <= 1:
        return BallReal.exact(1, b.prec)
    if b.lo >= 1:
        return b
    return BallReal(Fraction(1), b.hi, b.prec)


def _fr(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _mahler_enclosure(coeffs, eps_bits: int, prec: int) -> BallReal:
    """Enclosure of |lc| * prod max(1, |root|) over all roots of coeffs.

    Root isolation (real intervals, complex rectangles) comes from sympy
    with exact rational bounds; everything after that is ball arithmetic,
    so the result is a genuine superset of the Mahler measure.
    """
    poly = _Poly(list(reversed(coeffs)), _X, domain=ZZ)
    eps = sympy.Rational(1, 1 << eps_bits)
    real_parts, complex_parts = poly.intervals(all=True, eps=eps)
    acc = BallReal.exact(abs(coeffs[-1]), prec)
    for (a, b), mult in real_parts:
        if mult != 1:
            raise ValidationError("repeated root in a squarefree polynomial")
        acc = acc * _max_one(abs(_hull(_fr(a), _fr(b), prec)))
    for (lo_corner, hi_corner), mult in complex_parts:
        if mult != 1:
            raise ValidationError("repeated root in a squarefree polynomial")
        re_lo, im_lo = lo_corner.as_real_imag()
        re_hi, im_hi = hi_corner.as_real_imag()
        re = _hull(_fr(re_lo), _fr(re_hi), prec)
        im = _hull(_fr(im_lo), _fr(im_hi), prec)
        acc = acc * _max_one((re.square() + im.square()).sqrt())
    return acc


def weil_height_alg(x, prec: int = DEFAULT_PREC) -> BallReal:
    """Enclosure of the absolute multiplicative height H(x).

    Rational input is exact: H(p/q) = max(|p|, |q|) for reduced p/q.  For
    irrational x the Mahler measure of the minimal polynomial is enclosed
    from certified root isolation and its degree-th root taken; isolation
    is refined until the relative width of the result drops below 2^(4-prec).
    """
    x = _coerce_alg(x)
    if x.is_rational:
        v = x.rational_value
        return BallReal.exact(max(abs(v.numerator), abs(v.denominator)), prec)
    d = x.degree
    eps_bits = prec + 16
    while eps_bits <= _EPS_CEILING:
        h = _mahler_enclosure(x.coeffs, eps_bits, eps_bits + 32).root(d)
        if h.hi - h.lo <= h.hi * Fraction(1, 1 << (prec - 4)):
            return h.at_prec(prec)
        eps_bits *= 2
    raise PrecisionExhausted("height enclosure failed to converge")


# ---------------------------------------------------------------------------
# roots of unity


def cyclotomic_index(coeffs) -> int | None:
    """n such that coeffs is the n-th cyclotomic polynomial, else None.

    coeffs is a primitive integer polynomial, low degree first.  Since
    phi(n) >= sqrt(n/2), candidates with phi(n) = d all satisfy n <= 2d^2.
    """
    d = len(coeffs) - 1
    if d < 1:
        return None
    target = list(coeffs)
    for n in range(1, 2 * d * d + 2):
        if sympy.totient(n) != d:
            continue
        ref = _Poly(sympy.cyclotomic_poly(n, _X), _X).all_coeffs()
        if list(reversed(ref)) == target:
            return n
    return None


# ---------------------------------------------------------------------------
# the gap test


def _power_ratio(a: int, b: int):
    """ln(a)/ln(b) as an exact Fraction when a, b >= 1 share a common base.

    Returns None when the ratio is irrational (a and b multiplicatively
    independent).  b >= 2 required; a = 1 gives 0 exactly.
    """
    if a == 1:
        return Fraction(0)
    # primitive base of b: largest j with an exact integer j-th root
    for j in range(b.bit_length(), 0, -1):
        c, exact = integer_nthroot(b, j)
        if exact and c >= 2:
            t, i = a, 0
            while t % c == 0:
                t //= c
                i += 1
            if t == 1:
                return Fraction(i, j)
            return None
    return None


def _divides(part, minpoly: _Poly) -> bool:
    """Exact root membership: does minpoly divide part over the rationals?"""
    if part is None:
        return True  # the zero polynomial vanishes everywhere
    rem = part.as_sympy().set_domain(QQ).rem(minpoly.set_domain(QQ))
    return bool(rem.is_zero)


@dataclass(frozen=True)
class GapReport:
    """Outcome of the sparse-gap splitting test.

    ``gap_condition_holds`` is None when the certified enclosure of the
    threshold could not be separated from the integer gap.  ``threshold``
    always encloses log(k*H(f))/log H(beta); ``threshold_exact`` is set
    when that ratio is an exact rational (common-power case).
    """

    gap_condition_holds: bool | None
    beta_is_root_of_f: bool
    beta_common_root_of_parts: bool
    gap: int
    term_count: int
    poly_height: int
    beta_height: BallReal
    threshold: BallReal
    threshold_exact: Fraction | None
    convention: str = HEIGHT_CONVENTION


def _beta_height_above_one(beta: AlgebraicNumber, prec: int) -> BallReal:
    """H(beta) with a certified lower bound > 1; HeightOne when it is 1."""
    if beta.is_rational:
        v = beta.rational_value
        h = max(abs(v.numerator), abs(v.denominator))
        if h == 1:
            raise HeightOne(f"H({v}) = 1 degenerates the gap threshold")
        return BallReal.exact(h, prec)
    p = prec
    while p <= _EPS_CEILING:
        h = weil_height_alg(beta, p)
        if h.lo > 1:
            return h
        p *= 2
    raise PrecisionExhausted("could not certify H(beta) > 1")


def gap_split_check(f: SparsePolynomial, d0: int, d1: int, beta,
                    prec: int = DEFAULT_PREC) -> GapReport:
    """Run the splitting test for f relative to the gap (d0, d1) at beta.

    Pre: each term of f has degree <= d0 or >= d1 (else BadSplit), beta is
    not a root of unity (else RootOfUnity) and H(beta) > 1 (else HeightOne).
    The inequality tested is d1 - d0 > log(k*H(f)) / log H(beta) with k+1
    the term count of f.  Root membership of beta in f and in both split
    parts is decided exactly via minimal-polynomial divisibility.
    """
    if len(f) < 2:
        raise ValidationError("the gap test needs a polynomial with >= 2 terms")
    low, high = f.split(d0, d1)  # raises BadSplit on a stray term
    beta = _coerce_alg(beta)
    n = cyclotomic_index(beta.coeffs)
    if n is not None:
        raise RootOfUnity(f"beta is a primitive {n}-th root of unity")
    hbeta = _beta_height_above_one(beta, prec)

    k = len(f) - 1
    hf = poly_height(f)
    gap = d1 - d0
    scaled = k * hf

    exact = None
    if beta.is_rational:
        exact = _power_ratio(scaled, int(hbeta.lo))
    elif scaled == 1:
        exact = Fraction(0)

    if exact is not None:
        holds = gap > exact
        threshold = BallReal.from_fraction(exact, prec)
    else:
        holds, threshold, p = None, None, prec
        while p <= _EPS_CEILING:
            num = BallReal.exact(scaled, p).log()
            threshold = num / _beta_height_above_one(beta, p).log()
            side = threshold.compare(Fraction(gap))
            if side is not None:
                holds = side < 0
                break
            p *= 2
        # overlapping at the ceiling: report None rather than guess

    minpoly = _Poly(list(reversed(beta.coeffs)), _X, domain=ZZ)
    root_of_f = _divides(f, minpoly)
    common = _divides(low, minpoly) and _divides(high, minpoly)

    return GapReport(
        gap_condition_holds=holds,
        beta_is_root_of_f=root_of_f,
        beta_common_root_of_parts=common,
        gap=gap,
        term_count=len(f),
        poly_height=hf,
        beta_height=hbeta,
        threshold=threshold,
        threshold_exact=exact,
    )
