import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.errors import (
    DivisionByZero,
    Indeterminate,
    IsolatorInvalid,
    ParseError,
    ValidationError,
)
from sturmlab.kernel import (
    AlgebraicNumber,
    AngleGrid,
    BallComplex,
    BallReal,
    Window,
    exact_add,
    exact_mul,
    floor_exact,
    format_value,
    frac,
    parse_value,
    refine,
    sign_exact,
    window_member_exact,
)
from sturmlab.kernel.ops import DegradedBallReal


def sqrt5_theta():
    return AlgebraicNumber.from_quadratic(3, -1, 5, 2)  # (3-sqrt5)/2


def golden():
    return AlgebraicNumber.from_quadratic(1, 1, 5, 2)  # (1+sqrt5)/2


# ---------------------------------------------------------------- balls

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=997)


@settings(max_examples=200, deadline=None)
@given(rationals, rationals)
def test_ball_add_mul_contain_exact_result(a, b):
    ba = BallReal.from_fraction(a, 64)
    bb = BallReal.from_fraction(b, 64)
    assert (ba + bb).contains(a + b)
    assert (ba * bb).contains(a * b)
    assert (ba - bb).contains(a - b)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals)
def test_ball_div_contains_exact_result(a, b):
    if b == 0:
        return
    ba = BallReal.from_fraction(a, 64)
    bb = BallReal.from_fraction(b, 64)
    if bb.contains_zero():
        return
    assert (ba / bb).contains(Fraction(a) / Fraction(b))


def test_ball_mid_rad_are_dyadic():
    b = BallReal.from_fraction(Fraction(1, 3), 64)
    for v in (b.mid, b.rad):
        assert v.denominator & (v.denominator - 1) == 0
    assert b.rad <= Fraction(1, 2 ** 60)
    assert b.contains(Fraction(1, 3))


def test_ball_division_by_zero_enclosure():
    z = BallReal(Fraction(-1, 8), Fraction(1, 8), 53)
    with pytest.raises(DivisionByZero):
        BallReal.exact(1) / z


def test_ball_square_straddling_zero_stays_nonnegative():
    z = BallReal(Fraction(-1, 2), Fraction(1, 4), 53)
    sq = z.square()
    assert sq.lo == 0 and sq.hi == Fraction(1, 4)


def test_ball_sqrt_log_exp_enclose():
    two = BallReal.exact(2, 128)
    r = two.sqrt()
    assert r.lo ** 2 <= 2 <= r.hi ** 2
    back = r.square()
    assert back.contains(Fraction(2))
    e = BallReal.exact(1, 96).exp()
    assert e.log().contains(Fraction(1))


def test_ball_compare_and_sign():
    a = BallReal(Fraction(1, 4), Fraction(1, 2), 53)
    b = BallReal(Fraction(3, 4), Fraction(7, 8), 53)
    assert a.compare(b) == -1
    assert b.compare(a) == 1
    assert a.compare(a) is None
    assert a.sign() == 1
    assert BallReal(Fraction(-1), Fraction(1), 53).sign() is None
    assert BallReal.exact(0).sign() == 0


def test_complex_ball_mul_div_abs():
    z = BallComplex.exact(1, 1, 96)  # 1+i
    w = z * z
    assert w.re.contains(Fraction(0)) and w.im.contains(Fraction(2))
    q = w / z  # back to 1+i
    assert q.re.contains(Fraction(1)) and q.im.contains(Fraction(1))
    a2 = z.abs2()
    assert a2.contains(Fraction(2))
    m = abs(z)
    assert m.lo ** 2 <= 2 <= m.hi ** 2


def test_complex_ball_pow():
    z = BallComplex.exact(1, 1, 96)
    w = z ** 4  # (1+i)^4 = -4
    assert w.re.contains(Fraction(-4)) and w.im.contains(Fraction(0))
    inv = z ** -2  # 1/(2i) = -i/2
    assert inv.re.contains(Fraction(0)) and inv.im.contains(Fraction(-1, 2))


# ---------------------------------------------------------- algebraic numbers

def test_sqrt2_basic():
    s2 = AlgebraicNumber.sqrt_of_rational(2)
    assert s2.coeffs == (-2, 0, 1)
    assert s2.sign_exact() == 1
    assert s2.floor_exact() == 1
    sq = s2 * s2
    assert sq.is_rational and sq.rational_value == 2


def test_refine_meets_relative_radius_contract():
    s2 = AlgebraicNumber.sqrt_of_rational(2)
    for prec in (64, 128, 300):
        b = s2.refine(prec)
        assert b.rad <= Fraction(2) ** (1 - prec) * max(1, abs(b.mid))
        assert b.lo ** 2 <= 2 <= b.hi ** 2


def test_refine_rational_exact_dyadic():
    x = AlgebraicNumber.from_rational(Fraction(3, 2))
    b = x.refine(128)
    assert b.lo == b.hi == Fraction(3, 2)
    y = AlgebraicNumber.from_rational(Fraction(1, 3))
    b = y.refine(128)
    assert b.contains(Fraction(1, 3)) and b.rad <= Fraction(2) ** -120


def test_sign_of_composed_zero_expression():
    s2 = AlgebraicNumber.sqrt_of_rational(2)
    z = s2 * s2 - AlgebraicNumber.from_rational(2)
    assert z.is_rational and z.rational_value == 0
    assert sign_exact(z) == 0


def test_golden_identities():
    phi = golden()
    th = sqrt5_theta()
    # phi * theta = 1/phi, and theta == 1 - 1/phi == 2 - phi
    assert (phi + th).rational_value == 2
    assert phi * th == phi.inverse()
    assert th == AlgebraicNumber.from_rational(1) - phi.inverse()
    assert th == phi.affine(-1, 2)


def test_inverse_and_pow():
    phi = golden()
    assert phi.inverse().coeffs == (-1, 1, 1)
    p3 = phi ** 3
    # phi^3 = 2phi + 1
    assert p3 == phi.affine(2, 1)
    assert (phi ** 0).rational_value == 1
    r = AlgebraicNumber.from_rational(Fraction(2, 3)) ** -2
    assert r.rational_value == Fraction(9, 4)


def test_floor_frac_dispatch():
    th = sqrt5_theta()
    assert floor_exact(th.affine(8, 0)) == 3  # 8*theta ~ 3.0557
    f = frac(th.affine(8, 0))
    assert sign_exact(f) == 1
    assert floor_exact(f) == 0
    assert frac(Fraction(7, 3)) == Fraction(1, 3)
    assert frac(5) == 0
    ball = BallReal(Fraction(9, 8), Fraction(10, 8), 53)
    assert floor_exact(ball) == 1
    straddling = BallReal(Fraction(7, 8), Fraction(9, 8), 53)
    with pytest.raises(Indeterminate):
        floor_exact(straddling)


def test_exact_ops_degrade_above_degree_cap():
    a = parse_value("alg:-2,0,0,0,0,0,0,0,0,1@[1,2]")       # 2^(1/9)
    b = parse_value("alg:-3,0,0,0,0,0,0,0,1@[1,2]")          # 3^(1/8)
    out = exact_add(a, b, cap=16)
    assert isinstance(out, DegradedBallReal) and out.degraded
    assert abs(float(out.mid) - (2 ** (1 / 9) + 3 ** (1 / 8))) < 1e-9
    keep = exact_mul(a, b, cap=128)
    assert isinstance(keep, AlgebraicNumber) and keep.degree == 72


def test_complex_algebraic_roundtrip():
    z = parse_value("alg:2,-2,1@[1/2,3/2]x[1/2,3/2]")  # 1+i
    assert not z.is_real
    sq = z * z
    assert sq.coeffs == (4, 0, 1)  # 2i
    w = z + z.conj()
    assert w.is_rational and w.rational_value == 2
    assert parse_value(z.literal()) == z
    with pytest.raises(ValidationError):
        z.sign_exact()


def test_literal_grammar_accepts_and_rejects():
    assert parse_value("rat:3/4") == Fraction(3, 4)
    assert parse_value("rat:-7") == Fraction(-7)
    q = parse_value("quad:(1+1*sqrt(5))/2")
    assert q == golden()
    qc = parse_value("quad:(0+1*sqrt(-1))/1")  # i
    assert not qc.is_real and qc.coeffs == (1, 0, 1)
    with pytest.raises(ParseError):
        parse_value("quad:(1+1*sqrt(4))/2")  # perfect square
    with pytest.raises(ParseError):
        parse_value("alg:1,0,-1@[0,2]")  # reducible
    with pytest.raises(ParseError):
        parse_value("nope:77")
    with pytest.raises(ParseError):
        parse_value("rat:1/0")


def test_literal_roundtrip_bit_exact():
    values = [
        Fraction(22, 7),
        AlgebraicNumber.sqrt_of_rational(3),
        sqrt5_theta(),
        parse_value("alg:2,-2,1@[1/2,3/2]x[1/2,3/2]"),
        golden().inverse(),
    ]
    for v in values:
        text = format_value(v)
        back = parse_value(text)
        if isinstance(v, Fraction):
            assert back == v
        else:
            assert back == v
        assert format_value(back) == text


def test_isolator_with_two_roots_rejected():
    with pytest.raises((IsolatorInvalid, ParseError, ValidationError)):
        parse_value("alg:-2,0,1@[-2,2]")  # both square roots of 2


def test_refine_respects_prec_ceiling(monkeypatch):
    monkeypatch.setenv("STURMLAB_PREC_CEILING", "128")
    from sturmlab.errors import PrecisionExhausted
    with pytest.raises(PrecisionExhausted):
        refine(AlgebraicNumber.sqrt_of_rational(2), 512)


def test_cubic_refinement_and_sign():
    # real root of x^3 - x - 1 (plastic-like), approx 1.3247
    v = parse_value("alg:-1,-1,0,1@[1,2]")
    b = v.refine(200)
    assert b.rad <= Fraction(2) ** -198 * 2
    x = float(b.mid)
    assert abs(x ** 3 - x - 1) < 1e-12
    assert v.sign_exact() == 1
    assert v.floor_exact() == 1
    w = v * v - v  # still algebraic, degree 3
    assert w.degree == 3
    assert floor_exact(w) == 0


# ------------------------------------------------------------------ angle grid

def test_grid_matches_exact_membership_for_rational_data():
    import random
    rng = random.Random(11)
    for _ in range(60):
        q = rng.randint(7, 499)
        theta = Fraction(rng.randint(1, q - 1), q)
        x = Fraction(rng.randint(0, q - 1), q)
        a = Fraction(rng.randint(0, 3), 7)
        b = min(a + Fraction(rng.randint(1, 3), 5), Fraction(1))
        if a >= b:
            continue
        g = AngleGrid(theta, x)
        w = Window(a, b)
        got, _ = g.indicator(w, 0, 40)
        for n in range(40):
            v = (x + n * theta) % 1
            assert bool(got[n]) == window_member_exact(v, w)


def test_grid_exact_boundary_hits():
    th = sqrt5_theta()
    g = AngleGrid(th, 0)
    w = Window(Fraction(0), th)
    got, hits = g.indicator(w, 0, 3)
    assert got[0] == 1          # the point 0 itself, include_lo
    assert got[1] == 0          # frac(theta) == theta == upper endpoint, excluded
    assert 0 in hits and 1 in hits
    w_open = Window(Fraction(0), th, include_lo=False)
    got_open, _ = g.indicator(w_open, 0, 1)
    assert got_open[0] == 0
    w_zero = Window(th, Fraction(1), include_zero=True)
    got_zero, _ = g.indicator(w_zero, 0, 2)
    assert got_zero[0] == 1     # 0 pulled in by include_zero
    assert got_zero[1] == 1     # theta is the included lower endpoint


def test_grid_requires_exact_inputs():
    with pytest.raises(ValidationError):
        AngleGrid(BallReal.exact(1, 53), 0)
