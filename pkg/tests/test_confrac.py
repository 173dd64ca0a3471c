"""Continued fractions: frozen digit/denominator oracles on the three
quadratic slopes used everywhere else, the convergent laws, and a pure-integer
best-approximation oracle that never touches the kernel."""

from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.confrac import (
    cf_expand,
    dist_to_int,
    is_best_approx,
    positive_side_denominators,
)
from sturmlab.errors import Indeterminate, ValidationError
from sturmlab.kernel import BallReal
from sturmlab.kernel.algebraic import AlgebraicNumber

FIB_SLOPE = AlgebraicNumber.from_quadratic(3, -1, 5, 2)   # (3 - sqrt5)/2
INV_PHI = AlgebraicNumber.from_quadratic(-1, 1, 5, 2)     # (sqrt5 - 1)/2
SQRT2_M1 = AlgebraicNumber.from_quadratic(-1, 1, 2, 1)    # sqrt2 - 1


def test_cf_digits_quadratics():
    cf = cf_expand(FIB_SLOPE, 10)
    assert cf.quotients == (2,) + (1,) * 9
    assert not cf.terminated and not cf.truncated
    assert cf_expand(INV_PHI, 8).quotients == (1,) * 8
    assert cf_expand(SQRT2_M1, 5).quotients == (2,) * 5


def test_cf_rational_terminates():
    cf = cf_expand(Fraction(5, 8), 10)
    assert cf.quotients == (1, 1, 1, 2)
    assert cf.terminated and not cf.truncated
    assert cf.convergents[-1] == (5, 8)


def test_cf_rejects_out_of_range():
    with pytest.raises(ValidationError):
        cf_expand(Fraction(3, 2), 4)
    with pytest.raises(ValidationError):
        cf_expand(Fraction(0), 4)


def test_cf_ball_truncates_honestly():
    exact = cf_expand(FIB_SLOPE, 50).quotients
    cf = cf_expand(FIB_SLOPE.refine(48), 50)
    assert cf.truncated
    assert 0 < len(cf.quotients) < 50
    assert cf.quotients == exact[:len(cf.quotients)]


def test_convergent_approximation_law():
    # |theta - p_i/q_i| < 1/(q_i q_{i+1}), checked as an exact sign test
    for theta in (FIB_SLOPE, INV_PHI, SQRT2_M1):
        cf = cf_expand(theta, 13)
        for i in range(len(cf.convergents) - 1):
            p, q = cf.convergents[i]
            qn = cf.convergents[i + 1][1]
            s = theta.affine(q, -p).sign_exact()
            # 1 - qn*s*(q*theta - p) > 0
            assert theta.affine(-s * qn * q, 1 + s * qn * p).sign_exact() > 0


def test_positive_side_frozen_oracles():
    assert positive_side_denominators(FIB_SLOPE, 4) == [1, 3, 8, 21]
    assert positive_side_denominators(INV_PHI, 5) == [1, 2, 5, 13, 34]
    assert positive_side_denominators(SQRT2_M1, 3) == [1, 5, 29]


def test_positive_side_rejects_rational():
    with pytest.raises(ValidationError):
        positive_side_denominators(Fraction(5, 8), 3)


def test_dist_to_int_examples():
    value, signed = dist_to_int(5, INV_PHI)
    assert signed.sign() == 1
    assert abs(float(value.mid) - 0.0901699) < 1e-6
    value, signed = dist_to_int(8, FIB_SLOPE)
    assert signed.sign() == 1
    assert abs(float(value.mid) - 0.0557281) < 1e-6
    value, signed = dist_to_int(1, Fraction(1, 2))
    assert value.lo == value.hi == Fraction(1, 2)


def test_dist_to_int_ball_near_half_integer():
    wobble = Fraction(1, 1 << 10)
    theta = BallReal(Fraction(1, 2) - wobble, Fraction(1, 2) + wobble, 64)
    with pytest.raises(Indeterminate):
        dist_to_int(1, theta)


def test_is_best_approx_examples():
    assert is_best_approx(5, INV_PHI) is True
    assert is_best_approx(4, INV_PHI) is False
    assert is_best_approx(2, FIB_SLOPE) is True
    with pytest.raises(ValidationError):
        is_best_approx(1, INV_PHI)


# -- pure-integer oracle for ‖q theta‖ comparisons on (u + v sqrt(D))/w ------

def _sign_int_quad(p: int, q: int, d: int) -> int:
    """sign(p + q*sqrt(d)) for integers with d > 0 not a perfect square."""
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return 1 if q > 0 else -1
    if p > 0 and q > 0:
        return 1
    if p < 0 and q < 0:
        return -1
    lhs, rhs = p * p, q * q * d  # |p| vs |q|sqrt(d)
    if lhs == rhs:
        return 0
    bigger_p = lhs > rhs
    return (1 if p > 0 else -1) if bigger_p else (1 if q > 0 else -1)


def _dist_sq_cmp(k1: int, m1: int, k2: int, m2: int, u: int, v: int, w: int,
                 d: int) -> int:
    """sign(|k1 t - m1|^2 - |k2 t - m2|^2) for t = (u + v sqrt(d))/w."""
    a1, b1 = k1 * u - m1 * w, k1 * v
    a2, b2 = k2 * u - m2 * w, k2 * v
    pp = (a1 * a1 + b1 * b1 * d) - (a2 * a2 + b2 * b2 * d)
    qq = 2 * (a1 * b1 - a2 * b2)
    return _sign_int_quad(pp, qq, d)


_SQRT_CACHE = {}


def _nearest_int(k: int, u: int, v: int, w: int, d: int) -> int:
    if d not in _SQRT_CACHE:
        _SQRT_CACHE[d] = Fraction(isqrt(d << 256), 1 << 128)
    lo = Fraction(k * u + k * v * _SQRT_CACHE[d], w)
    m = round(lo)
    # certify with an exact sign test on k*t - (m ± 1/2)
    assert _sign_int_quad(2 * (k * u - m * w) + w, 2 * k * v, d) > 0
    assert _sign_int_quad(2 * (k * u - m * w) - w, 2 * k * v, d) < 0
    return m


def _best_approx_set(u, v, w, d, q_max):
    """All q <= q_max with ‖q t‖ strictly below every earlier ‖q' t‖."""
    best = []
    champ = None
    for k in range(1, q_max + 1):
        m = _nearest_int(k, u, v, w, d)
        if champ is None or _dist_sq_cmp(k, m, *champ, u, v, w, d) < 0:
            champ = (k, m)
            best.append(k)
    return best


def test_best_approx_against_integer_oracle():
    u, v, w, d = -1, 1, 2, 5  # 1/phi
    oracle = _best_approx_set(u, v, w, d, 10_000)
    denoms = [q for _, q in cf_expand(INV_PHI, 25).convergents]
    # best approximations of the second kind are exactly the convergent
    # denominators (q = 1 appears as both q_0 and q_1 here)
    assert set(oracle) == {q for q in denoms if q <= 10_000}
    for q in oracle:
        if 2 <= q <= 400:
            assert is_best_approx(q, INV_PHI) is True
    import random
    rng = random.Random(7)
    non_best = [q for q in rng.sample(range(2, 400), 12) if q not in oracle]
    for q in non_best:
        assert is_best_approx(q, INV_PHI) is False


def test_positive_side_are_best_approximations():
    for theta, count in ((FIB_SLOPE, 5), (INV_PHI, 5), (SQRT2_M1, 3)):
        for q in positive_side_denominators(theta, count):
            if q >= 2:
                assert is_best_approx(q, theta) is True


@given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)))
@settings(max_examples=60, deadline=None)
def test_cf_rational_roundtrip(x):
    if x == 0 or x >= 1:
        return
    cf = cf_expand(x, 64)
    assert cf.terminated
    rebuilt = Fraction(0)
    for a in reversed(cf.quotients):
        rebuilt = Fraction(1, a + rebuilt)
    assert rebuilt == x
    p, q = cf.convergents[-1]
    assert (p, q) == (x.numerator // gcd(x.numerator, x.denominator),
                      x.denominator // gcd(x.numerator, x.denominator))


@given(st.integers(min_value=2, max_value=60))
@settings(max_examples=25, deadline=None)
def test_cf_ball_prefix_matches_exact(d):
    if isqrt(d) ** 2 == d:
        return
    # sqrt(d) shifted into (0, 1)
    theta = AlgebraicNumber.from_quadratic(-isqrt(d), 1, d, 1)
    exact = cf_expand(theta, 12).quotients
    ball_cf = cf_expand(theta.refine(300), 12)
    n = len(ball_cf.quotients)
    assert ball_cf.quotients == exact[:n]
    if n < 12:
        assert ball_cf.truncated
