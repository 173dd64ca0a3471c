"""Contracted rotations end to end: the map and its lift against exact
rational arithmetic, rotation-number enclosures against a period-2 orbit and
a pure-integer plateau solver, the staircase inversion against the frozen
offset for the Fibonacci slope, the digit series against independent codings,
and intercept recovery/decomposition on certified attractor samples."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.errors import (
    Indeterminate,
    ItineraryAmbiguous,
    NotOnAttractor,
    ValidationError,
)
from sturmlab.kernel import BallReal, to_ball
from sturmlab.kernel.algebraic import AlgebraicNumber
from sturmlab.kernel.ops import affine_value, frac, sign_exact
from sturmlab.rotor import (
    AttractorSample,
    ContractedRotation,
    Decomposition,
    SecondForm,
    apply_f,
    attractor_sample,
    decompose_limit_point,
    delta_for_rotation,
    lift_F,
    recover_intercept,
    rotation_number,
    xi,
    xi_digits,
    xi_prime,
    xi_prime_digits,
    _plateau_edges_exact,
)
from sturmlab.words import CodingSpec, theta_coding

FIB_SLOPE = AlgebraicNumber.from_quadratic(3, -1, 5, 2)  # (3 - sqrt5)/2
GOLDEN = AlgebraicNumber.from_quadratic(-1, 1, 5, 2)  # 1/phi = (sqrt5 - 1)/2

# frozen: xi at 0 for lam = 1/2, theta = (3 - sqrt5)/2 (ceiling series),
# and the floor series at x = theta, which equals the base-2 value of the
# Fibonacci word; the offset below is lam + (1 - lam) * XI_ZERO.
XI_ZERO = Fraction("0.29019655713870874")
FIB_SERIES_BASE2 = Fraction("0.5803931142774175")
OFFSET_STAR = Fraction("0.6450982785693543")

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def offset_band():
    """Certified offset band for rotation number (3 - sqrt5)/2 at lam = 1/2."""
    return delta_for_rotation(HALF, FIB_SLOPE, Fraction(1, 10**8))


@pytest.fixture(scope="module")
def pinned_map(offset_band):
    return ContractedRotation(HALF, offset_band.mid)


@pytest.fixture(scope="module")
def sample(pinned_map):
    return attractor_sample(pinned_map, 80, 160)


# -- the map and its lift ----------------------------------------------------


def test_apply_f_exact_values():
    cr = ContractedRotation(HALF, Fraction(3, 4))
    r = apply_f(cr, Fraction(0))
    assert (r.value, r.branch) == (Fraction(3, 4), 0)
    r = apply_f(cr, Fraction(3, 4))
    assert (r.value, r.branch) == (Fraction(1, 8), 1)
    # boundary: lam*x + delta = 1 wraps to exactly 0
    r = apply_f(cr, Fraction(1, 2))
    assert (r.value, r.branch) == (Fraction(0), 1)
    assert cr.break_point == Fraction(1, 2)


def test_apply_f_rejects_bad_inputs():
    cr = ContractedRotation(HALF, Fraction(3, 4))
    with pytest.raises(ValidationError):
        apply_f(cr, Fraction(-1, 10))
    with pytest.raises(ValidationError):
        apply_f(cr, Fraction(1))
    with pytest.raises(ValidationError):
        ContractedRotation(HALF, Fraction(1, 3))  # lam + delta <= 1
    with pytest.raises(ValidationError):
        ContractedRotation(Fraction(1), Fraction(3, 4))
    with pytest.raises(ValidationError):
        ContractedRotation(HALF, Fraction(1))


def test_apply_f_ball_straddle_is_indeterminate():
    cr = ContractedRotation(HALF, Fraction(3, 4))
    wide = BallReal(HALF - Fraction(1, 256), HALF + Fraction(1, 256), 16)
    with pytest.raises(Indeterminate):
        apply_f(cr, wide)
    # away from the break point the branch certifies at the same width
    off = BallReal(Fraction(1, 4), Fraction(1, 4) + Fraction(1, 256), 16)
    assert apply_f(cr, off).branch == 0


def test_lift_examples():
    cr = ContractedRotation(HALF, Fraction(3, 4))
    assert lift_F(cr, Fraction(-1, 4)) == Fraction(1, 8)
    assert lift_F(cr, Fraction(0)) == Fraction(3, 4)
    assert lift_F(cr, Fraction(1)) == Fraction(7, 4)


def test_lift_laws_on_seeded_rationals():
    # F(x + 1) = F(x) + 1 and frac(F(x)) = f(frac(x)), exactly
    rng = random.Random(20260818)
    cr = ContractedRotation(Fraction(5, 8), Fraction(7, 9))
    for _ in range(1000):
        num = rng.randrange(-4000, 4000)
        den = rng.randrange(1, 1000)
        x = Fraction(num, den)
        fx = lift_F(cr, x)
        assert lift_F(cr, x + 1) == fx + 1
        step = apply_f(cr, x - (num // den))
        assert fx - (fx.numerator // fx.denominator) == step.value


@st.composite
def unit_rotations(draw):
    lam = draw(st.fractions(Fraction(1, 10), Fraction(9, 10),
                            max_denominator=64))
    t = draw(st.integers(1, 127))
    # delta in (1 - lam, 1): the wrap region is nonempty
    return ContractedRotation(lam, 1 - lam + Fraction(t, 128) * lam)


@settings(deadline=None, max_examples=60)
@given(unit_rotations(), st.fractions(0, Fraction(255, 256),
                                      max_denominator=512))
def test_apply_f_branch_property(cr, x):
    r = apply_f(cr, x)
    y = cr.lam * x + cr.delta
    assert r.branch == (1 if y >= 1 else 0)
    assert r.value == y - r.branch
    assert 0 <= r.value < 1


# -- rotation numbers --------------------------------------------------------


def test_rotation_number_period_two():
    # delta = 3/4 sits inside the rho = 1/2 locking interval: the orbit of 0
    # is eventually {1/4, 7/8}-periodic, so every enclosure must contain 1/2
    cr = ContractedRotation(HALF, Fraction(3, 4))
    r = rotation_number(cr, 4000)
    assert r.lo <= HALF <= r.hi
    assert r.hi - r.lo <= Fraction(1, 1000)


def test_rotation_number_refines_consistently():
    with pytest.raises(ValidationError):
        ContractedRotation(Fraction(7, 10), Fraction(3, 10))  # sum not > 1
    cr = ContractedRotation(Fraction(7, 10), Fraction(4, 5))
    prev = None
    for n in (500, 1000, 2000, 4000):
        r = rotation_number(cr, n)
        assert r.hi - r.lo <= Fraction(4, n)
        if prev is not None:
            assert r.lo <= prev.hi and prev.lo <= r.hi
        prev = r


def test_rotation_number_never_reverses_order():
    lam = Fraction(3, 5)
    offsets = [Fraction(9, 20), Fraction(3, 5), Fraction(3, 4),
               Fraction(9, 10)]
    rs = [rotation_number(ContractedRotation(lam, d), 1500) for d in offsets]
    for a, b in zip(rs, rs[1:]):
        assert a.lo <= b.hi


def test_locking_interval_for_one_half():
    # at lam = 1/2 the rho = 1/2 plateau is delta in (2/3, 5/6): the
    # geometric series along the period-2 word gives both edges exactly
    lo1, lo2, hi1, hi2 = _plateau_edges_exact(1, 2, 1, 2)
    assert lo1 == lo2 == Fraction(2, 3)
    assert hi1 == hi2 == Fraction(5, 6)
    inside = rotation_number(ContractedRotation(HALF, Fraction(41, 60)), 3000)
    assert inside.lo <= HALF <= inside.hi


# -- staircase inversion -----------------------------------------------------


def test_delta_for_rotation_hits_frozen_offset(offset_band):
    d = offset_band
    assert abs(d.mid - OFFSET_STAR) <= Fraction(1, 10**8) + Fraction(1, 2**40)
    assert d.lo < d.hi < 1


def test_delta_for_rotation_validations():
    with pytest.raises(ValidationError):
        delta_for_rotation(HALF, Fraction(1, 3), Fraction(1, 100))
    with pytest.raises(ValidationError):
        delta_for_rotation(Fraction(0), FIB_SLOPE, Fraction(1, 100))
    with pytest.raises(ValidationError):
        delta_for_rotation(HALF, FIB_SLOPE, Fraction(0))


def test_delta_for_rotation_coarse_tolerance_is_the_full_gap():
    # any offset above 1 - lam rotates within lam of any target
    d = delta_for_rotation(HALF, FIB_SLOPE, Fraction(3, 5))
    assert abs(d.lo - HALF) <= Fraction(1, 2**40)
    assert abs(d.hi - 1) <= Fraction(1, 2**40)


def test_delta_roundtrip_through_rotation_number(offset_band):
    # run the certified band itself as the offset: the enclosure of the
    # rotation number, widened by the requested tolerance, must meet theta
    cr = ContractedRotation(HALF, offset_band)
    r = rotation_number(cr, 20000)
    tol = Fraction(1, 10**8)
    assert sign_exact(affine_value(FIB_SLOPE, 1, -(r.hi + tol))) <= 0
    assert sign_exact(affine_value(FIB_SLOPE, 1, -(r.lo - tol))) >= 0


# -- digit series ------------------------------------------------------------


def test_xi_frozen_values():
    v = xi(Fraction(0), HALF, FIB_SLOPE, 128)
    assert abs(v.mid - XI_ZERO) <= Fraction(1, 2**45)
    assert v.hi - v.lo <= Fraction(1, 2**100)
    w = xi_prime(Fraction(0), HALF, FIB_SLOPE, 128)
    assert abs(w.mid - v.mid) <= Fraction(1, 2**100)


def test_xi_prime_at_theta_is_the_fibonacci_series():
    v = xi_prime(FIB_SLOPE, HALF, FIB_SLOPE, 128)
    assert abs(v.mid - FIB_SERIES_BASE2) <= Fraction(1, 2**45)


def test_xi_only_sees_x_mod_one():
    a = xi(Fraction(1, 3), HALF, FIB_SLOPE, 96)
    b = xi(Fraction(7, 3), HALF, FIB_SLOPE, 96)
    assert a.lo == b.lo and a.hi == b.hi
    c = xi(FIB_SLOPE.affine(1, 2), HALF, FIB_SLOPE, 96)
    d = xi(FIB_SLOPE, HALF, FIB_SLOPE, 96)
    assert c.lo == d.lo and c.hi == d.hi


def test_ceiling_digits_complement_a_coding():
    # c_n(x) = 1 - u_n where u is the coding of -x - theta by slope
    # 1 - theta; the first seven digits at x = 1/3 witness that the
    # complement is genuinely needed
    n = 10_000
    x = Fraction(1, 3)
    c = xi_digits(x, FIB_SLOPE, n)
    assert c.symbols[:7] == bytes((1, 0, 0, 1, 0, 1, 0))
    u = theta_coding(CodingSpec(FIB_SLOPE.affine(-1, 1),
                                FIB_SLOPE.affine(-1, Fraction(2, 3))), n)
    assert u.symbols[:7] == bytes((0, 1, 1, 0, 1, 0, 1))
    assert c.symbols == bytes(1 - b for b in u.symbols)


def test_floor_digits_are_a_shifted_coding():
    # f_n(x) = coding of x + theta by theta, literally
    n = 10_000
    x = Fraction(1, 3)
    f = xi_prime_digits(x, FIB_SLOPE, n)
    u = theta_coding(CodingSpec(FIB_SLOPE, FIB_SLOPE.affine(1, x)), n)
    assert f.symbols == u.symbols


def test_digit_identities_at_the_golden_point():
    # same pair at x = theta = 1/phi
    n = 10_000
    c = xi_digits(GOLDEN, GOLDEN, n)
    u = theta_coding(CodingSpec(GOLDEN.affine(-1, 1),
                                frac(GOLDEN.affine(-2, 2))), n)
    assert c.symbols == bytes(1 - b for b in u.symbols)
    f = xi_prime_digits(GOLDEN, GOLDEN, n)
    v = theta_coding(CodingSpec(GOLDEN, frac(GOLDEN.affine(2, -1))), n)
    assert f.symbols == v.symbols


# -- attractor sampling and decomposition ------------------------------------


def test_attractor_sample_shape(sample):
    assert isinstance(sample, AttractorSample)
    assert len(sample.points) == 160
    assert len(sample.itinerary) == 160
    assert sample.burn_in == 80
    assert sample.depth_bound.hi <= Fraction(1, 2**79)
    for p in sample.points:
        assert 0 <= p.lo and p.hi < 1


def test_itinerary_is_the_coding_of_its_intercept(sample):
    arc = recover_intercept(sample.itinerary, FIB_SLOPE)
    w = theta_coding(CodingSpec(FIB_SLOPE, arc.witness),
                     len(sample.itinerary))
    assert w.symbols == sample.itinerary.symbols


def test_decompose_certifies_small_residual(pinned_map, sample):
    d = decompose_limit_point(pinned_map, sample.points[100], 64, 120,
                              theta=FIB_SLOPE)
    assert isinstance(d, Decomposition)
    assert d.residual.hi <= Fraction(1, 2**60)
    assert d.symbols_used >= 64
    # the witness really lies inside the reported enclosure
    assert sign_exact(affine_value(d.x_witness, 1, -d.x_enclosure.lo)) >= 0
    assert sign_exact(affine_value(d.x_witness, 1, -d.x_enclosure.hi)) <= 0


def test_decompose_matches_reassembled_point(pinned_map, sample):
    # rebuild y from the recovered pieces: z + xi(0) - xi(-x) must land
    # inside the sampled enclosure up to the certified residual
    y = sample.points[0]
    d = decompose_limit_point(pinned_map, y, 64, 120, theta=FIB_SLOPE)
    assert isinstance(d, Decomposition)
    assert d.residual.hi <= Fraction(1, 2**60)
    back = (to_ball(d.z, 256) + xi(Fraction(0), HALF, FIB_SLOPE, 256)
            - xi(affine_value(d.x_witness, -1, 0), HALF, FIB_SLOPE, 256))
    gap = abs(back - y)
    assert gap.lo <= Fraction(1, 2**59)


def test_decompose_flags_the_degenerate_form(pinned_map):
    # the right edge of the gap at frac(3*theta) pinches its cylinder onto
    # a positive-index lattice point: no symbol count resolves digit 2
    y = (xi(Fraction(0), HALF, FIB_SLOPE, 512)
         - xi(FIB_SLOPE.affine(-3, 0), HALF, FIB_SLOPE, 512))
    if y.lo < 0:
        y = y + 1
    r = decompose_limit_point(pinned_map, y, 64, 512, theta=FIB_SLOPE)
    assert isinstance(r, SecondForm)
    assert r.m == 3
    assert "frac(3*theta)" in r.gamma_note


def test_decompose_rejects_alien_itineraries():
    # delta = 3/4 locks rho at 1/2; its itinerary leaves every cylinder of
    # the Fibonacci-slope coding within a few symbols
    cr = ContractedRotation(HALF, Fraction(3, 4))
    with pytest.raises(NotOnAttractor):
        decompose_limit_point(cr, Fraction(1, 2), 64, 128, theta=FIB_SLOPE)


def test_decompose_validations(pinned_map):
    with pytest.raises(ValidationError):
        decompose_limit_point(pinned_map, Fraction(1, 3), 3, 128,
                              theta=FIB_SLOPE)
    with pytest.raises(ValidationError):
        decompose_limit_point(pinned_map, Fraction(1, 3), 64, 8,
                              theta=FIB_SLOPE)
    with pytest.raises(ValidationError):
        decompose_limit_point(pinned_map, Fraction(1, 3), 64, 128,
                              theta=Fraction(2, 5))
