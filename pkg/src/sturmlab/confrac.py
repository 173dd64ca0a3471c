"""Simple continued fractions of reals on (0, 1) with certified digits.

Conventions: a_0 = 0 is implicit, the stored quotients are a_1, a_2, ...;
convergents start at (p_0, q_0) = (0, 1) and follow the usual recurrence
p_i = a_i p_{i-1} + p_{i-2}, q_i = a_i q_{i-1} + q_{i-2}.  The signed
distances q_i*theta - p_i strictly alternate in sign starting positive at
i = 0, so the positive-side denominator subsequence is the even-index one --
but it is recomputed from exact sign tests here, never assumed.

Digits for exact algebraic input come from the subtractive floor algorithm
(inverse + integer shift stay within the same quadratic field, so each digit
is an exact sign decision, never a float guess).  Rational input terminates:
the full finite expansion is returned with ``terminated=True``.  Ball input
expands while the enclosure still certifies the next digit and comes back
flagged ``truncated=True`` once it no longer does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import Indeterminate, PrecisionExhausted, ValidationError
from .kernel import DEFAULT_PREC, BallReal, floor_exact, sign_exact
from .kernel.algebraic import AlgebraicNumber
from .kernel.ops import affine_value as _affine


def _require_unit_interval(theta) -> None:
    if sign_exact(theta) <= 0 or sign_exact(_affine(theta, -1, 1)) <= 0:
        raise ValidationError("expected a value strictly between 0 and 1")


@dataclass(frozen=True)
class ContinuedFraction:
    """Expansion [0; a_1, a_2, ...] together with its convergents.

    ``convergents[i]`` is (p_i, q_i) with (p_0, q_0) = (0, 1);
    ``convergents[i]`` for i >= 1 belongs to ``quotients[i-1]``.
    ``terminated`` marks a rational input whose expansion ended early;
    ``truncated`` marks a ball input whose width stopped certifying digits.
    """

    theta: object = field(repr=False)
    quotients: tuple
    convergents: tuple
    terminated: bool = False
    truncated: bool = False

    def __post_init__(self):
        ps, qs = zip(*self.convergents)
        for i, a in enumerate(self.quotients, start=1):
            if a < 1:
                raise ValidationError(f"partial quotient a_{i} = {a} < 1")
            pprev, qprev = (1, 0) if i == 1 else self.convergents[i - 2]
            if self.convergents[i] != (a * ps[i - 1] + pprev,
                                       a * qs[i - 1] + qprev):
                raise ValidationError(f"convergent recurrence broken at i={i}")
        if list(qs[1:]) != sorted(set(qs[1:])):
            raise ValidationError("denominators q_1, q_2, ... must increase")

    def signed_distance(self, i: int):
        """q_i*theta - p_i, in theta's own kind."""
        p, q = self.convergents[i]
        return _affine(self.theta, q, -p)


def _expand_fraction(x: Fraction, count: int):
    """Euclid on a rational in (0, 1): quotients of [0; a_1, ...]."""
    num, den = x.numerator, x.denominator
    quotients = []
    while num and len(quotients) < count:
        a, rem = divmod(den, num)
        quotients.append(a)
        num, den = rem, num
    return quotients, num == 0


def _expand_algebraic(x: AlgebraicNumber, count: int):
    quotients = []
    while len(quotients) < count:
        inv = x.inverse()
        a = floor_exact(inv)
        quotients.append(a)
        x = inv.affine(1, -a)
    return quotients, False


def _expand_ball(x: BallReal, count: int):
    """Digits certified by the enclosure; stops at the first uncertain one."""
    quotients = []
    one = BallReal.exact(1, x.prec)
    while len(quotients) < count:
        if x.contains_zero():
            return quotients, True
        inv = one / x
        klo = inv.lo.numerator // inv.lo.denominator
        khi = inv.hi.numerator // inv.hi.denominator
        if klo != khi:
            return quotients, True
        quotients.append(klo)
        x = inv - klo
    return quotients, False


def _convergents(quotients):
    pairs = [(0, 1)]
    pprev, qprev = 1, 0
    for a in quotients:
        p, q = pairs[-1]
        pairs.append((a * p + pprev, a * q + qprev))
        pprev, qprev = p, q
    return tuple(pairs)


def cf_expand(theta, count: int) -> ContinuedFraction:
    """First ``count`` certified partial quotients of theta in (0, 1)."""
    if count < 1:
        raise ValidationError("need at least one partial quotient")
    _require_unit_interval(theta)
    terminated = truncated = False
    if isinstance(theta, AlgebraicNumber) and theta.is_rational:
        value = theta.rational_value
    else:
        value = theta
    if isinstance(value, (int, Fraction)):
        quotients, terminated = _expand_fraction(Fraction(value), count)
    elif isinstance(value, AlgebraicNumber):
        quotients, _ = _expand_algebraic(value, count)
    elif isinstance(value, BallReal):
        quotients, truncated = _expand_ball(value, count)
    else:
        raise ValidationError(f"unsupported value type {type(value).__name__}")
    return ContinuedFraction(theta=theta, quotients=tuple(quotients),
                             convergents=_convergents(quotients),
                             terminated=terminated, truncated=truncated)


def dist_to_int(q: int, theta, prec: int = DEFAULT_PREC):
    """(‖q*theta‖, q*theta - round(q*theta)) as enclosures.

    round() is half-to-even, which only matters for rational theta landing
    exactly on a half-integer; irrational multiples never do.
    """
    if q < 1:
        raise ValidationError("q must be a positive integer")
    t = _affine(theta, q, 0)
    if isinstance(t, Fraction):
        signed = BallReal.from_fraction(t - round(t), prec)
        return abs(signed), signed
    if isinstance(t, AlgebraicNumber):
        nearest = floor_exact(t.affine(1, Fraction(1, 2)))
        signed = t.affine(1, -nearest).refine(prec)
        return abs(signed), signed
    # ball: the shifted floor must be certified by the enclosure
    shifted = t + Fraction(1, 2)
    klo = shifted.lo.numerator // shifted.lo.denominator
    khi = shifted.hi.numerator // shifted.hi.denominator
    if klo != khi:
        raise Indeterminate("q*theta is too close to a half-integer "
                            "for the certified width")
    signed = t - klo
    return abs(signed), signed


def positive_side_denominators(theta, count: int) -> list:
    """Convergent denominators q_i with q_i*theta - p_i > 0, smallest first.

    Sign alternation makes these the even-index convergents, but each sign is
    still decided exactly.  Rational theta is rejected (the expansion
    terminates); a ball too wide for the needed digits raises.
    """
    if count < 1:
        raise ValidationError("need at least one denominator")
    cf = cf_expand(theta, 2 * count - 1)
    if cf.terminated:
        raise ValidationError("rational input has a terminating expansion; "
                              "an irrational value is required")
    if cf.truncated:
        raise PrecisionExhausted(
            f"only {len(cf.quotients)} digits certified, "
            f"{2 * count - 1} needed")
    out = []
    last = None
    for i in range(len(cf.convergents)):
        s = sign_exact(cf.signed_distance(i))
        if s == 0 or s == last:
            raise ValidationError(f"signed distances fail to alternate at i={i}")
        last = s
        if s > 0:
            out.append(cf.convergents[i][1])
    return out[:count]


def is_best_approx(q: int, theta) -> bool:
    """True iff ‖q*theta‖ < ‖q'*theta‖ for every 1 <= q' < q.

    Direct scan with exact comparisons: |a| < |b| iff (b - a)(b + a) > 0,
    and both factors are integer-affine in theta, so each comparison is a
    pair of exact sign tests (fast for quadratic theta).
    """
    if q < 2:
        raise ValidationError("q must be at least 2")

    def signed(k: int):
        n = floor_exact(_affine(theta, k, Fraction(1, 2)))
        return _affine(theta, k, -n)

    target = signed(q)
    for qp in range(1, q):
        rival = signed(qp)
        diff = sign_exact(_sub(rival, target))
        summ = sign_exact(_add(rival, target))
        if diff * summ <= 0:  # ‖q'θ‖ <= ‖qθ‖
            return False
    return True


def _add(a, b):
    if isinstance(a, AlgebraicNumber) or isinstance(b, AlgebraicNumber):
        x = a if isinstance(a, AlgebraicNumber) else AlgebraicNumber.from_rational(a)
        return x.add(b)
    return a + b


def _sub(a, b):
    if isinstance(a, AlgebraicNumber) or isinstance(b, AlgebraicNumber):
        return _add(a, -b)
    return a - b
