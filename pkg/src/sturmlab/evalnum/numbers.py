"""Digit sequences over an algebraic base: series evaluation with rigorous
tails, exact partial sums, mismatch coefficients, and the key inequality.

The number attached to a digit sequence u over base beta is
Sigma_{n>=0} u_n beta^{-n}, where u_n is the exact alphabet value at word
position n.  Evaluation truncates at N terms and folds the geometric tail
bound A_max * |beta|^{-(N+1)} / (1 - |beta|^{-1}) into the enclosure, with
A_max a certified bound on the alphabet and |beta| replaced by its certified
lower bound -- so the result is a genuine superset no matter where the true
digits wander.

The key inequality compares |beta^r a - a - a_r - Sigma_j c_j beta^{-i_j}|
against |beta|^{-s} for a stutter record (r, s, leaders).  The subtracted
part is assembled exactly in Q(beta) (see :mod:`.field`) and converted to an
enclosure once, at the end; only the series value a itself carries a radius,
which the wrapping loop shrinks until the two sides separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import (
    Indeterminate,
    IndexOutOfRange,
    PrecisionExhausted,
    PrefixTooShort,
    ValidationError,
)
from ..kernel import DEFAULT_PREC, AlgebraicNumber, BallComplex, BallReal
from ..words import Word
from .field import FieldElem

_PREC_CEILING = 1 << 16


def _coerce_exact(value) -> AlgebraicNumber:
    if isinstance(value, AlgebraicNumber):
        return value
    if isinstance(value, (int, Fraction)):
        return AlgebraicNumber.from_rational(value)
    raise ValidationError(f"expected an exact base, got {type(value).__name__}")


class Base:
    """An algebraic base beta with a certified modulus bound |beta| > 1."""

    __slots__ = ("beta", "modulus_lower", "modulus_upper")

    def __init__(self, beta):
        self.beta = _coerce_exact(beta)
        # roots of unity sit exactly on |beta| = 1; no enclosure can ever
        # reject them, so rule them out algebraically first
        from ..heights import cyclotomic_index
        if cyclotomic_index(self.beta.coeffs) is not None:
            raise ValidationError("base needs |beta| > 1")
        prec = 64
        while True:
            m = abs(self.beta.refine_rect(prec))
            if m.lo > 1:
                self.modulus_lower = m.lo
                self.modulus_upper = m.hi
                return
            if m.hi <= 1:
                raise ValidationError("base needs |beta| > 1")
            if prec > 4096:
                raise PrecisionExhausted("cannot separate |beta| from 1")
            prec *= 2

    @property
    def minpoly(self) -> tuple:
        return self.beta.coeffs

    @property
    def is_real(self) -> bool:
        return self.beta.is_real

    def elem(self, value) -> FieldElem:
        return FieldElem.of(self.minpoly, value)

    def beta_elem(self) -> FieldElem:
        return FieldElem.generator(self.minpoly)

    def abs_ball(self, prec: int) -> BallReal:
        return abs(self.beta.refine_rect(prec))

    def rect(self, elem: FieldElem, prec: int) -> BallComplex:
        """Certified enclosure of a field element, via Horner at beta."""
        if elem.minpoly != self.minpoly:
            raise ValidationError("field element belongs to a different base")
        r = elem.rational()
        if r is not None:
            return BallComplex.exact(r, 0, prec)
        bz = self.beta.refine_rect(prec + 16)
        acc = BallComplex.exact(elem.coords[-1], 0, prec + 16)
        for c in reversed(elem.coords[:-1]):
            acc = acc * bz + Fraction(c)
        return acc

    def __repr__(self):
        return f"Base({self.beta.literal()}, |beta| >= {float(self.modulus_lower):.6g})"


class DigitSequence:
    """A finite word plus a deterministic generator for longer prefixes.

    ``prefix(n)`` always returns the same first n symbols regardless of how
    far the sequence was extended before -- enforced, not assumed: each
    extension is checked against the cached prefix.
    """

    __slots__ = ("_provider", "_cached", "alphabet")

    def __init__(self, provider, alphabet=None):
        self._provider = provider
        first = provider(1)
        if alphabet is None:
            if not isinstance(first, Word):
                raise ValidationError(
                    "an explicit alphabet is required unless the provider returns words")
            alphabet = first.alphabet
        self.alphabet = tuple(alphabet)
        self._cached = self._as_word(first)
        if len(self._cached) < 1:
            raise ValidationError("digit provider returned a short word")

    def _as_word(self, raw) -> Word:
        if isinstance(raw, Word):
            return raw
        return Word(self.alphabet, bytes(raw))

    @classmethod
    def from_word(cls, word: Word) -> "DigitSequence":
        def provider(n: int) -> Word:
            if n > len(word):
                raise PrefixTooShort(
                    f"only {len(word)} digits available, {n} requested")
            return Word(word.alphabet, word.symbols[:n])
        return cls(provider, word.alphabet)

    @classmethod
    def from_coding(cls, spec) -> "DigitSequence":
        from ..words import theta_coding
        return cls(lambda n: theta_coding(spec, n))

    @classmethod
    def constant(cls, value) -> "DigitSequence":
        alphabet = (value,)
        return cls(lambda n: Word(alphabet, bytes(n)), alphabet)

    def prefix(self, n: int) -> Word:
        if n > len(self._cached):
            longer = self._as_word(self._provider(n))
            if longer.symbols[:len(self._cached)] != self._cached.symbols:
                raise ValidationError("digit provider is not deterministic")
            self._cached = longer
        return Word(self.alphabet, self._cached.symbols[:n])

    def digit_values(self, n: int) -> list:
        w = self.prefix(n)
        return [self.alphabet[s] for s in w.symbols]


def _alphabet_abs_bound(alphabet) -> Fraction:
    """Certified upper bound for max |value| over the alphabet."""
    bound = Fraction(0)
    for v in alphabet:
        if isinstance(v, (int, Fraction)):
            bound = max(bound, abs(Fraction(v)))
        elif isinstance(v, AlgebraicNumber):
            bound = max(bound, abs(v.refine_rect(32)).hi)
        else:
            raise ValidationError(f"unsupported alphabet value {v!r}")
    return bound


def _widen(ball: BallReal, margin: Fraction, prec: int) -> BallReal:
    return BallReal(ball.lo - margin, ball.hi + margin, prec)


def sturmian_number(seq: DigitSequence, base: Base,
                    prec: int = DEFAULT_PREC) -> BallComplex:
    """Enclosure of Sigma_{n>=0} u_n beta^{-n} with the tail in the radius.

    The term count N is the smallest (up to a step of 8) making the exact
    geometric tail bound at most 2^-(prec+2); the partial sum itself is a
    Horner pass in a certified enclosure of 1/beta.
    """
    a_max = _alphabet_abs_bound(seq.alphabet)
    m = base.modulus_lower
    if a_max == 0:
        zero = BallReal.exact(0, prec)
        return BallComplex(zero, zero)
    # smallest N (up to a step of 8) with the exact tail bound below target
    target = Fraction(1, 1 << (prec + 2))
    est = (prec + 2 + math.log2(float(a_max) / (1 - 1 / float(m)))) \
        / math.log2(float(m))
    n_terms = max(1, int(est))
    while a_max * m ** -(n_terms + 1) / (1 - 1 / m) > target:
        n_terms += 8
    wp = prec + 48
    inv = base.beta.inverse().refine_rect(wp)
    if base.is_real and all(isinstance(v, (int, Fraction)) for v in seq.alphabet):
        invr = inv.re
        acc = BallReal.exact(0, wp)
        for v in reversed(seq.digit_values(n_terms + 1)):
            acc = acc * invr + Fraction(v)
        return BallComplex(_widen(acc, target, prec), BallReal.exact(0, prec))
    rects = {i: (BallComplex.exact(v, 0, wp) if isinstance(v, (int, Fraction))
                 else v.refine_rect(wp))
             for i, v in enumerate(seq.alphabet)}
    acc = BallComplex.exact(0, 0, wp)
    for s in reversed(seq.prefix(n_terms + 1).symbols):
        acc = acc * inv + rects[s]
    return BallComplex(_widen(acc.re, target, prec), _widen(acc.im, target, prec))


def partial_alpha(w: Word, base: Base, r: int):
    """Exact Sigma_{j=0}^{r} u_j beta^(r-j), as a field element.

    Requires rational digit values (the Sturmian case); the word must hold
    at least r+1 symbols.
    """
    if r < 0:
        raise ValidationError("r must be nonnegative")
    if r >= len(w):
        raise PrefixTooShort(f"need {r + 1} digits, word has {len(w)}")
    if not all(isinstance(v, (int, Fraction)) for v in w.alphabet):
        raise ValidationError("partial sums need rational digit values")
    b = base.beta_elem()
    acc = base.elem(w.alphabet[w.symbols[0]])
    for j in range(1, r + 1):
        acc = acc * b + Fraction(w.alphabet[w.symbols[j]])
    return acc


@dataclass(frozen=True)
class CCoefficient:
    """One mismatch coefficient c_j with its certified-nonzero flag."""

    leader: int
    value: FieldElem
    nonzero: bool


def c_coefficients(w: Word, r: int, leaders, base: Base) -> list:
    """c_j = (u_{i_j+r} - u_{i_j}) + (u_{i_j+r+1} - u_{i_j+1}) / beta.

    Exact in Q(beta); a zero c_j is legal input but flagged, since a genuine
    mismatch pair never produces one.
    """
    if not all(isinstance(v, (int, Fraction)) for v in w.alphabet):
        raise ValidationError("mismatch coefficients need rational digits")
    binv = base.beta_elem().inverse()

    def u(k: int) -> Fraction:
        return Fraction(w.alphabet[w.symbols[k]])

    out = []
    for i in leaders:
        if i < 0 or i + r + 1 >= len(w):
            raise IndexOutOfRange(
                f"leader {i} needs digits up to {i + r + 1}, word has {len(w)}")
        c = base.elem(u(i + r) - u(i)) + base.elem(u(i + r + 1) - u(i + 1)) * binv
        out.append(CCoefficient(leader=i, value=c, nonzero=not c.is_zero()))
    return out


@dataclass(frozen=True)
class KeyInequalityReport:
    """Certified comparison of the mismatch identity against |beta|^-s."""

    lhs: BallReal
    rhs: BallReal
    holds: bool
    prec_used: int
    r: int
    s: int
    leaders: tuple


def check_key_inequality(seq: DigitSequence, base: Base, r: int, s: int,
                         leaders, prec: int = DEFAULT_PREC) -> KeyInequalityReport:
    """Decide |beta^r a - a - a_r - Sigma_j c_j beta^{-i_j}| < |beta|^{-s}.

    a is the series value of seq; everything else is exact in Q(beta).
    The comparison retries at doubled precision until the enclosures
    separate, raising Indeterminate at the ceiling.
    """
    leaders = tuple(leaders)
    horizon = max(r + 1, (max(leaders) + r + 2) if leaders else 0)
    w = seq.prefix(horizon)
    alpha_r = partial_alpha(w, base, r)
    cs = c_coefficients(w, r, leaders, base)
    binv = base.beta_elem().inverse()
    correction = alpha_r
    for c in cs:
        correction = correction + c.value * binv.pow(c.leader)
    beta_r = base.beta_elem().pow(r)

    # |beta|^r amplifies the radius of a; pay for it up front
    amplify = int(math.ceil((r + s) * math.log2(float(base.modulus_upper)))) + 32
    p = max(prec, amplify)
    while p <= _PREC_CEILING:
        a = sturmian_number(seq, base, p)
        lhs_rect = (base.rect(beta_r, p) * a - a
                    - base.rect(correction, p))
        lhs = abs(lhs_rect)
        rhs = base.abs_ball(p) ** (-s)
        side = lhs.compare(rhs)
        if side is not None:
            return KeyInequalityReport(lhs=lhs, rhs=rhs, holds=side < 0,
                                       prec_used=p, r=r, s=s, leaders=leaders)
        p *= 2
    raise Indeterminate(
        f"sides of the key inequality do not separate below 2^{_PREC_CEILING} bits")
