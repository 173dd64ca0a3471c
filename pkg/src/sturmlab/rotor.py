"""Contracted rotations f(x) = frac(lam*x + delta) and their limit sets.

For 0 < lam < 1 < lam + delta both affine branches of f move points
forward, and every orbit converges to a minimal invariant set on which f
acts like the circle rotation by a number rho(delta).  The module
computes certified rotation numbers from integer-scaled bounding orbits
of the monotone lift; inverts delta -> rho for irrational targets (rho is
a devil's staircase, locked at the value p/q on an interval of width on
the order of lam^q, so midpoint bisection stalls inside plateaus -- the
inversion walks the target's convergents and solves each locking interval
from its q-cycle instead); evaluates the ceiling- and floor-increment
digit series xi and xi'; samples the limit set with its wrap itinerary;
and decomposes a limit point as z + xi_0 - xi_(-x), recovering the
conjugacy intercept x from the itinerary as an exact cylinder arc whose
endpoints lie on the lattice frac(k*theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .confrac import cf_expand
from .errors import (
    Indeterminate,
    ItineraryAmbiguous,
    NotOnAttractor,
    PrecisionExhausted,
    TolUnreachable,
    ValidationError,
)
from .kernel import (
    AlgebraicNumber,
    AngleGrid,
    BallReal,
    Window,
    exact_add,
    exact_mul,
    floor_exact,
    frac,
    is_exact,
    sign_exact,
    to_ball,
)
from .kernel.ops import affine_value
from .words import Word


def _rational_of(v):
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, AlgebraicNumber) and v.is_rational:
        return v.rational_value
    return None


def _require_unit_open(v, name: str) -> None:
    if not is_exact(v) or isinstance(v, int):
        raise ValidationError(f"{name} must be an exact value in (0, 1)")
    if sign_exact(v) <= 0 or sign_exact(affine_value(v, -1, 1)) <= 0:
        raise ValidationError(f"{name} must lie strictly in (0, 1)")


def _sum_exceeds_one(lam, d_lo) -> bool:
    """Certified lam + d_lo > 1 across the supported kind mixes."""
    r = _rational_of(d_lo)
    if r is not None:
        return sign_exact(affine_value(lam, 1, r - 1)) > 0
    r = _rational_of(lam)
    if r is not None:
        return sign_exact(affine_value(d_lo, 1, r - 1)) > 0
    s = exact_add(lam, d_lo)
    if isinstance(s, BallReal):
        return s.compare(Fraction(1)) == 1
    return sign_exact(affine_value(s, 1, -1)) > 0


@dataclass(frozen=True)
class ContractedRotation:
    """Branch slope lam in (0, 1) and offset delta with lam + delta > 1.

    delta may be a BallReal: certified results then hold for every offset
    inside the enclosure at once.  Under the stated constraints the wrap
    threshold (1 - delta)/lam always lies in (0, 1).
    """

    lam: object
    delta: object

    def __post_init__(self):
        _require_unit_open(self.lam, "slope")
        d = self.delta
        if isinstance(d, BallReal):
            d_lo, d_hi = d.lo, d.hi
        elif is_exact(d):
            d_lo = d_hi = d
        else:
            raise ValidationError(
                f"unsupported offset type {type(d).__name__}")
        if sign_exact(d_lo) <= 0 \
                or sign_exact(affine_value(d_hi, -1, 1)) <= 0:
            raise ValidationError("offset must lie strictly in (0, 1)")
        if not _sum_exceeds_one(self.lam, d_lo):
            raise ValidationError("need lam + delta > 1, certified")

    @property
    def break_point(self):
        """(1 - delta)/lam: f wraps exactly on [break_point, 1)."""
        d = self.delta
        if isinstance(d, BallReal):
            p = max(64, d.prec)
            return (1 - d) / to_ball(self.lam, p)
        one_minus = affine_value(d, -1, 1)
        rl = _rational_of(self.lam)
        if rl is not None:
            return affine_value(one_minus, 1 / rl, 0)
        rd = _rational_of(one_minus)
        if rd is not None:
            return affine_value(self.lam.inverse(), rd, 0)
        return exact_mul(one_minus, self.lam.inverse())


@dataclass(frozen=True)
class StepResult:
    """One application of f: the image point and the wrap branch taken."""

    value: object
    branch: int


def _exact_lam_x_plus(lam, x, delta):
    """lam*x + delta, exact where the kinds allow (may degrade to a ball)."""
    rl, rx = _rational_of(lam), _rational_of(x)
    if rx is not None:
        t = affine_value(lam, rx, 0) if rx else Fraction(0)
    elif rl is not None:
        t = affine_value(x, rl, 0)
    else:
        t = exact_mul(lam, x)
    rd = _rational_of(delta)
    if rd is not None:
        return affine_value(t, 1, rd)
    rt = _rational_of(t)
    if rt is not None:
        return affine_value(delta, 1, rt)
    return exact_add(t, delta)


def _ball_step(cr: ContractedRotation, x: BallReal) -> StepResult:
    p = max(64, x.prec)
    y = to_ball(cr.lam, p) * x + to_ball(cr.delta, p)
    c = y.compare(Fraction(1))
    if c is None:
        raise Indeterminate("wrap branch not certified by the enclosure")
    if c >= 0:
        return StepResult(y - 1, 1)
    return StepResult(y, 0)


def apply_f(cr: ContractedRotation, x) -> StepResult:
    """One step of f(x) = frac(lam*x + delta) with its branch bit.

    Exact inputs give an exact image; the boundary lam*x + delta = 1
    wraps, taking branch 1 with image exactly 0.  Ball inputs (or a ball
    offset) return a ball image and raise Indeterminate when the
    enclosure does not certify the branch.
    """
    if is_exact(x):
        if sign_exact(x) < 0 or sign_exact(affine_value(x, -1, 1)) <= 0:
            raise ValidationError("x must lie in [0, 1)")
        if not isinstance(cr.delta, BallReal):
            y = _exact_lam_x_plus(cr.lam, x, cr.delta)
            if not isinstance(y, BallReal):
                s = sign_exact(affine_value(y, 1, -1))
                if s > 0:
                    return StepResult(affine_value(y, 1, -1), 1)
                if s == 0:
                    return StepResult(Fraction(0), 1)
                return StepResult(y, 0)
        return _ball_step(cr, to_ball(x, 64))
    if isinstance(x, BallReal):
        if not (x.lo >= 0 and x.hi < 1):
            raise ValidationError("x enclosure must lie in [0, 1)")
        return _ball_step(cr, x)
    raise ValidationError(f"unsupported x type {type(x).__name__}")


def lift_F(cr: ContractedRotation, x):
    """Monotone lift F(x) = lam*frac(x) + delta + floor(x).

    Satisfies F(x + 1) = F(x) + 1 and frac(F(x)) = f(frac(x)).  Errors as
    frac: a ball straddling an integer raises Indeterminate.
    """
    k = floor_exact(x)
    r = frac(x)
    if is_exact(r) and not isinstance(cr.delta, BallReal):
        y = _exact_lam_x_plus(cr.lam, r, cr.delta)
    else:
        p = max(64, getattr(x, "prec", 64))
        y = to_ball(cr.lam, p) * to_ball(r, p) + to_ball(cr.delta, p)
    return affine_value(y, 1, k)


# -- integer-scaled bounding orbits of the lift -----------------------------

def _scaled_slope(cr: ContractedRotation, bits: int):
    """Rational lower/upper step multipliers (num, den) for the engine."""
    r = _rational_of(cr.lam)
    if r is not None:
        pair = (r.numerator, r.denominator)
        return pair, pair
    b = to_ball(cr.lam, bits + 32)
    return ((b.lo.numerator, b.lo.denominator),
            (b.hi.numerator, b.hi.denominator))


def _scaled_offset(cr: ContractedRotation, bits: int):
    """floor/ceil of 2^bits * delta over the whole offset range."""
    s = 1 << bits
    d = cr.delta
    if isinstance(d, BallReal):
        d_lo, d_hi = d.lo, d.hi
    else:
        r = _rational_of(d)
        if r is not None:
            d_lo = d_hi = r
        else:
            b = to_ball(d, bits + 32)
            d_lo, d_hi = b.lo, b.hi
    add_lo = (d_lo.numerator * s) // d_lo.denominator
    add_hi = -((-d_hi.numerator * s) // d_hi.denominator)
    return add_lo, add_hi


def _orbit_bounds(cr: ContractedRotation, n_steps: int, bits: int,
                  collect_from=None):
    """Two integer orbits bounding the lift orbit of 0 from below/above.

    Returns (g_lo, g_hi, branches, points, clean): after n_steps steps
    F^n(0) lies in [g_lo/S, g_hi/S] with S = 2^bits.  With collect_from
    set, per-step wrap bits and scaled point intervals are gathered from
    that step on; clean reports whether the bounding orbits agreed on
    every collected wrap bit and integer part (if not, retry wider).
    """
    s = 1 << bits
    (ln_lo, ld_lo), (ln_hi, ld_hi) = _scaled_slope(cr, bits)
    add_lo, add_hi = _scaled_offset(cr, bits)
    g_lo = g_hi = 0
    branches = bytearray() if collect_from is not None else None
    points = [] if collect_from is not None else None
    for n in range(n_steps):
        q_lo, r_lo = divmod(g_lo, s)
        q_hi, r_hi = divmod(g_hi, s)
        keep = collect_from is not None and n >= collect_from
        if keep:
            if q_lo != q_hi:
                return g_lo, g_hi, branches, points, False
            points.append((r_lo, r_hi))
        g_lo = (ln_lo * r_lo) // ld_lo + add_lo + q_lo * s
        g_hi = -((-ln_hi * r_hi) // ld_hi) + add_hi + q_hi * s
        if g_lo > g_hi:
            raise ValidationError("bounding orbits crossed")
        if keep:
            b_lo = g_lo // s - q_lo
            b_hi = g_hi // s - q_hi
            if b_lo != b_hi:
                return g_lo, g_hi, branches, points, False
            branches.append(b_lo)
    return g_lo, g_hi, branches, points, True


def rotation_number(cr: ContractedRotation, n_iter: int) -> BallReal:
    """Certified enclosure of rho = lim_n F^n(0)/n.

    The monotone lift keeps |F^n(0) - n*rho| <= 1, so the width is at
    most 2/n_iter plus the scaled-orbit slack and whatever a ball offset
    propagates.  For a ball delta the enclosure covers rho(d) for every
    offset d in the ball at once.
    """
    if n_iter < 1:
        raise ValidationError("n_iter must be positive")
    bits = 64
    g_lo, g_hi, _, _, _ = _orbit_bounds(cr, n_iter, bits)
    s = 1 << bits
    lo = Fraction(max(g_lo - s, 0), n_iter * s)
    hi = Fraction(min(g_hi + s, n_iter * s), n_iter * s)
    return BallReal.hull_of(BallReal.from_fraction(lo, 64),
                            BallReal.from_fraction(hi, 64))


# -- inverting delta -> rho along the locking ladder ------------------------

_LOCK_Q_CEILING = 1 << 15        # exact-slope q-cycle solves, O(q^2) bit cost
_LOCK_Q_CEILING_BALL = 1 << 12   # ball edges get expensive sooner


def _wrap_word_bit(i: int, p: int, q: int) -> int:
    return ((i + 1) * p) // q - (i * p) // q


def _plateau_edges_exact(a: int, b: int, p: int, q: int):
    """Exact locking interval of rho = p/q for slope a/b in lowest terms.

    Along the locked q-cycle x_(i+1) = (a/b) x_i + delta - w_i (wrap word
    w_i = floor((i+1)p/q) - floor(ip/q)) every point is affine in delta:
    x_i = (C_i + D_i delta)/b^i with integer recurrences, and the closing
    identity x_q = x_0 has denominator E = b^q - a^q.  Each step's branch
    inequality is affine in delta with positive slope, so the interval is
    a max/min of per-step bounds, compared here as integer pairs.
    """
    c_list = [0]
    d_list = [0]
    c = d = 0
    pow_b = 1
    w = bytearray(q)
    fl_prev = 0
    for i in range(q):
        fl_next = ((i + 1) * p) // q
        w[i] = fl_next - fl_prev
        fl_prev = fl_next
        pow_b *= b
        c = a * c - w[i] * pow_b
        d = a * d + pow_b
        c_list.append(c)
        d_list.append(d)
    e = b ** q - a ** q
    lo_n = lo_d = hi_n = hi_d = None
    pow_a = 1
    pow_b = 1
    for i in range(q):
        pow_a *= a
        pow_b *= b
        slope = pow_a * d + a * e * d_list[i] + e * pow_b
        const = pow_a * c + a * e * c_list[i] - e * pow_b
        n_, d_ = -const, slope
        if w[i]:
            if lo_n is None or n_ * lo_d > lo_n * d_:
                lo_n, lo_d = n_, d_
        else:
            if hi_n is None or n_ * hi_d < hi_n * d_:
                hi_n, hi_d = n_, d_
    if lo_n is None or hi_n is None:
        raise ValidationError("degenerate wrap word")
    lo_f = Fraction(lo_n, lo_d)
    hi_f = Fraction(hi_n, hi_d)
    if not lo_f < hi_f:
        raise ValidationError("empty locking interval")
    return lo_f, lo_f, hi_f, hi_f


def _plateau_edges_ball(lam, p: int, q: int, wp: int):
    """Outer enclosures of the locking-interval edges for irrational slope.

    Same cycle algebra as the exact solver, carried in balls; None when
    the working precision does not separate the two edges.
    """
    lb = to_ball(lam, wp)
    zero = BallReal.exact(0, wp)
    a_i = [zero]
    b_i = [zero]
    p_i = [BallReal.exact(1, wp)]
    w = bytearray(q)
    fl_prev = 0
    for i in range(q):
        fl_next = ((i + 1) * p) // q
        w[i] = fl_next - fl_prev
        fl_prev = fl_next
        a_i.append(lb * a_i[-1] - w[i])
        b_i.append(lb * b_i[-1] + 1)
        p_i.append(lb * p_i[-1])
    denom = 1 - p_i[q]
    lo_ball = hi_ball = None
    for i in range(q):
        coef = lb * p_i[i]
        slope = coef * b_i[q] / denom + lb * b_i[i] + 1
        const = coef * a_i[q] / denom + lb * a_i[i] - 1
        if slope.sign() != 1:
            return None
        bound = -const / slope
        if w[i]:
            lo_ball = bound if lo_ball is None else BallReal(
                max(lo_ball.lo, bound.lo), max(lo_ball.hi, bound.hi), wp)
        else:
            hi_ball = bound if hi_ball is None else BallReal(
                min(hi_ball.lo, bound.lo), min(hi_ball.hi, bound.hi), wp)
    if lo_ball is None or hi_ball is None:
        raise ValidationError("degenerate wrap word")
    if not lo_ball.hi < hi_ball.lo:
        return None
    return lo_ball.lo, lo_ball.hi, hi_ball.lo, hi_ball.hi


def _plateau(lam, rl, p: int, q: int):
    if rl is not None:
        return _plateau_edges_exact(rl.numerator, rl.denominator, p, q)
    wp = max(192, 4 * q + 128)
    for _ in range(4):
        edges = _plateau_edges_ball(lam, p, q, wp)
        if edges is not None:
            return edges
        wp *= 2
    raise PrecisionExhausted(
        f"locking interval at {p}/{q} not separated at {wp // 2} bits")


def _bracket_ball(lo_f: Fraction, hi_f: Fraction) -> BallReal:
    width = hi_f - lo_f
    if width <= 0:
        raise ValidationError("offset bracket collapsed")
    bits = max(64, 32 + width.denominator.bit_length()
               - abs(width.numerator).bit_length())
    return BallReal.hull_of(BallReal.from_fraction(lo_f, bits),
                            BallReal.from_fraction(hi_f, bits))


def delta_for_rotation(lam, theta, tol) -> BallReal:
    """Offset enclosure whose rotation numbers all lie within tol of theta.

    rho(delta) is continuous, nondecreasing, and constant at the value
    p/q on an interval of width on the order of lam^q around every
    rational p/q, taking irrational values only at single points: a
    devil's staircase.  Midpoint bisection therefore stalls -- near the
    target, rho moves by far less than any fixed iteration budget can
    resolve -- so this walks the convergents p/q of theta instead,
    solving each locking interval exactly and keeping the open gap
    between the last below-target plateau and the last above-target one.
    The gap contains the unique offset realising theta; every offset in
    it has rotation number strictly between the flanking convergents,
    hence within tol of theta once both convergents are.  The gap width
    shrinks like lam^q, so the result is usually far narrower than tol.

    tol at least the a priori bracket width lam returns the bracket
    (1 - lam, 1) at once.  Rational targets are rejected: rho takes each
    rational value on a whole interval, so no single offset is
    distinguished.  TolUnreachable marks a ladder deeper than the
    denominator ceiling (the q-cycle solve cost grows quadratically).
    """
    _require_unit_open(lam, "slope")
    if not is_exact(theta) or _rational_of(theta) is not None:
        raise ValidationError(
            "target rotation number must be exact and irrational")
    if sign_exact(theta) <= 0 \
            or sign_exact(affine_value(theta, -1, 1)) <= 0:
        raise ValidationError("target must lie strictly in (0, 1)")
    tol_f = Fraction(tol)
    if tol_f <= 0:
        raise ValidationError("tol must be positive")
    rl = _rational_of(lam)
    lo_val = 1 - rl if rl is not None else 1 - to_ball(lam, 192).hi
    hi_val = Fraction(1)
    if sign_exact(affine_value(lam, 1, -tol_f)) <= 0:
        return _bracket_ball(lo_val, hi_val)
    ceiling = _LOCK_Q_CEILING if rl is not None else _LOCK_Q_CEILING_BALL
    done_below = done_above = False
    processed = 0
    count = 12
    while True:
        cf = cf_expand(theta, count)
        for i in range(processed + 1, len(cf.convergents)):
            p, q = cf.convergents[i]
            if p == 0 or p == q:
                continue
            if q > ceiling:
                raise TolUnreachable(
                    f"tol {tol} needs locking denominators past {ceiling}; "
                    "q-cycle solves this deep are out of budget")
            lo_lo, lo_hi, hi_lo, hi_hi = _plateau(lam, rl, p, q)
            if sign_exact(affine_value(theta, q, -p)) > 0:
                lo_val = max(lo_val, hi_lo)
                if sign_exact(affine_value(theta, q, -p - q * tol_f)) <= 0:
                    done_below = True
            else:
                hi_val = min(hi_val, lo_hi)
                if sign_exact(affine_value(theta, -q, p - q * tol_f)) <= 0:
                    done_above = True
            if done_below and done_above and hi_val - lo_val <= tol_f:
                return _bracket_ball(lo_val, hi_val)
        processed = len(cf.convergents) - 1
        count *= 2


# -- the xi / xi' digit series ----------------------------------------------

def _require_slope(theta) -> None:
    if is_exact(theta):
        if _rational_of(theta) is not None:
            raise ValidationError("step must be irrational")
        if sign_exact(theta) <= 0 \
                or sign_exact(affine_value(theta, -1, 1)) <= 0:
            raise ValidationError("step must lie strictly in (0, 1)")
    elif isinstance(theta, BallReal):
        if not (theta.lo > 0 and theta.hi < 1):
            raise ValidationError("step enclosure must lie in (0, 1)")
    else:
        raise ValidationError(
            f"unsupported step type {type(theta).__name__}")


def _ceiling_window(theta) -> Window:
    return Window(affine_value(theta, -1, 1), Fraction(1),
                  include_lo=False, include_hi=False, include_zero=True)


def _floor_window(theta) -> Window:
    return Window(affine_value(theta, -1, 1), Fraction(1))


def _digit_word(x, theta, length: int, start: int, ceiling: bool) -> Word:
    if length < 0 or start < 0:
        raise ValidationError("length and start must be nonnegative")
    kind = "ceiling" if ceiling else "floor"
    note = f"{kind} digits, positions from {start + 1}"
    if length == 0:
        return Word((0, 1), b"", note)
    _require_slope(theta)
    n0 = 1 + start
    if is_exact(theta) and is_exact(x):
        grid = AngleGrid(theta, frac(x))
        win = _ceiling_window(theta) if ceiling else _floor_window(theta)
        bits, _ = grid.indicator(win, n0, length)
        return Word((0, 1), bytes(bits), note)
    tb = to_ball(theta)
    edge = 1 - tb
    out = bytearray(length)
    for j in range(length):
        v = frac(to_ball(x, tb.prec) + tb * (n0 + j))
        c = v.compare(edge)
        if c is None:
            raise Indeterminate(f"digit at position {n0 + j} is not "
                                "certified by the enclosure width")
        if not ceiling:
            out[j] = 1 if c >= 0 else 0
        elif c > 0 or v.lo == v.hi == 0:
            out[j] = 1
        elif c == 0 or v.lo > 0:
            out[j] = 0
        else:
            raise Indeterminate(f"digit at position {n0 + j}: enclosure "
                                "touches the lattice point 0")
    return Word((0, 1), bytes(out), note + "; ball-certified")


def xi_digits(x, theta, length: int, start: int = 0) -> Word:
    """Ceiling digits c_n(x) = [frac(x + n*theta) in {0} u (1-theta, 1)],
    n = start+1 .. start+length: equivalently the increments
    ceil(x + (n+1)theta) - ceil(x + n*theta) of the theta-ladder."""
    return _digit_word(x, theta, length, start, True)


def xi_prime_digits(x, theta, length: int, start: int = 0) -> Word:
    """Floor digits f_n(x) = [frac(x + n*theta) in [1-theta, 1)]: the
    increments floor(x + (n+1)theta) - floor(x + n*theta).  They differ
    from the ceiling digits only where frac(x + n*theta) hits 0 or
    1 - theta exactly, i.e. for x on the lattice Z*theta + Z."""
    return _digit_word(x, theta, length, start, False)


def _tail_digit_count(lam, prec: int):
    """Smallest convenient N with lam^(N+1)/(1-lam) <= 2^-(prec+2), plus
    a certified dyadic bound of that dropped tail."""
    lb = to_ball(lam, 96)
    gap = float(1 - lb.hi) or 2.0 ** -96
    rate = max(-math.log2(float(lb.hi)), gap * 1.4)
    n = max(4, math.ceil((prec + 2 - math.log2(gap)) / rate))
    target = Fraction(1, 1 << (prec + 2))
    while True:
        tail = lb ** (n + 1) / (1 - lb)
        if tail.hi <= target:
            return n, tail.hi
        n += max(8, n // 8)


def _series_value(symbols: bytes, lam, tail_hi: Fraction,
                  prec: int) -> BallReal:
    """sum_(n=1..N) symbols[n-1] * lam^n plus the one-sided tail bound."""
    rl = _rational_of(lam)
    wp = prec + 32
    if rl is not None:
        acc = Fraction(0)
        for s in reversed(symbols):
            acc = acc * rl + s
        body = BallReal.from_fraction(acc * rl, wp)
    else:
        lb = to_ball(lam, wp + max(len(symbols), 1).bit_length() + 8)
        acc = BallReal.exact(0, lb.prec)
        for s in reversed(symbols):
            acc = acc * lb + s
        body = acc * lb
    return body + BallReal(Fraction(0), tail_hi, wp)


def _digit_series(x, lam, theta, prec: int, ceiling: bool) -> BallReal:
    if prec < 8:
        raise ValidationError("prec must be at least 8")
    _require_unit_open(lam, "weight")
    n, tail_hi = _tail_digit_count(lam, prec)
    word = _digit_word(x, theta, n, 0, ceiling)
    return _series_value(word.symbols, lam, tail_hi, prec)


def xi(x, lam, theta, prec: int) -> BallReal:
    """Certified value of sum_(n>=1) c_n(x) lam^n over the ceiling digits.

    Digits come from xi_digits (exact for exact inputs, lattice hits
    included); the dropped tail is bounded by lam^(N+1)/(1-lam) at
    2^-(prec+2) and added as a one-sided enclosure.  Any exact real x is
    accepted -- the series only sees x mod 1."""
    return _digit_series(x, lam, theta, prec, True)


def xi_prime(x, lam, theta, prec: int) -> BallReal:
    """Certified value of sum_(n>=1) f_n(x) lam^n over the floor digits."""
    return _digit_series(x, lam, theta, prec, False)


# -- sampling the limit set --------------------------------------------------

@dataclass(frozen=True)
class AttractorSample:
    """Certified window of the limit set: the orbit points from step
    burn_in on, each within depth_bound = lam^burn_in of the limit set,
    with the wrap itinerary of the same steps."""

    points: tuple
    burn_in: int
    depth_bound: BallReal
    itinerary: Word


def attractor_sample(cr: ContractedRotation, burn_in: int,
                     n_points: int) -> AttractorSample:
    """Forward orbit of 0, recorded from step burn_in with branch bits.

    Exact rational parameters give exact point values (stored as tight
    balls); otherwise two integer-scaled bounding orbits run side by side
    and the scale escalates until every recorded wrap bit is certified.
    """
    if burn_in < 1 or n_points < 1:
        raise ValidationError("burn_in and n_points must be positive")
    note = f"wrap itinerary of the orbit of 0, steps from {burn_in}"
    total = burn_in + n_points
    rl = _rational_of(cr.lam)
    rd = None if isinstance(cr.delta, BallReal) else _rational_of(cr.delta)
    if rl is not None and rd is not None:
        x = Fraction(0)
        pts = []
        branches = bytearray()
        for n in range(total):
            y = rl * x + rd
            b = 1 if y >= 1 else 0
            if n >= burn_in:
                pts.append(BallReal.from_fraction(x, 192))
                branches.append(b)
            x = y - b
        depth = BallReal.exact(rl ** burn_in, 64)
        return AttractorSample(tuple(pts), burn_in, depth,
                               Word((0, 1), bytes(branches), note))
    bits = 128
    while True:
        _, _, branches, raw_pts, clean = _orbit_bounds(
            cr, total, bits, collect_from=burn_in)
        if clean:
            break
        bits *= 2
        if bits > (1 << 13):
            raise Indeterminate(
                "wrap itinerary not certified: a step straddles the "
                "branch boundary at every tried scale")
    s = 1 << bits
    pts = tuple(BallReal(Fraction(r_lo, s), Fraction(r_hi, s),
                         min(bits, 256))
                for (r_lo, r_hi) in raw_pts)
    depth = to_ball(cr.lam, 96) ** burn_in
    return AttractorSample(pts, burn_in, depth,
                           Word((0, 1), bytes(branches), note))


# -- itinerary -> intercept: exact cylinder arcs ------------------------------

_ONE = object()          # sentinel endpoint for the value 1 in fragments


class _ThetaLattice:
    """Exact point arithmetic on P(k) = frac(k*theta), memoised floors."""

    def __init__(self, theta):
        self.theta = theta
        self._floors = {0: 0}

    def floor(self, k: int) -> int:
        f = self._floors.get(k)
        if f is None:
            f = floor_exact(affine_value(self.theta, k, 0))
            self._floors[k] = f
        return f

    def value(self, k: int):
        """P(k) as an exact value in [0, 1)."""
        if k == 0:
            return Fraction(0)
        return affine_value(self.theta, k, -self.floor(k))

    def cmp(self, j, k) -> int:
        """Sign of P(j) - P(k); either key may be the _ONE sentinel."""
        if j is k:
            return 0
        if j is _ONE:
            return 1
        if k is _ONE:
            return -1
        if j == k:
            return 0
        return sign_exact(affine_value(
            self.theta, j - k, self.floor(k) - self.floor(j)))

    def member(self, x, lo, hi) -> bool:
        """x in the circular arc [P(lo), P(hi)), wrapping when
        P(lo) > P(hi); requires lo != hi as points."""
        if self.cmp(lo, hi) < 0:
            return self.cmp(x, lo) >= 0 and self.cmp(x, hi) < 0
        return self.cmp(x, lo) >= 0 or self.cmp(x, hi) < 0


def _arc_subset(lat: _ThetaLattice, a, b, c, d) -> bool:
    """[P(a), P(b)) subset of [P(c), P(d)) for proper circular arcs."""
    if not lat.member(a, c, d):
        return False
    if lat.cmp(b, d) != 0 and not lat.member(b, c, d):
        return False
    return not lat.member(d, a, b)


def _arc_disjoint(lat: _ThetaLattice, a, b, c, d) -> bool:
    """The proper circular arcs [P(a), P(b)) and [P(c), P(d)) are disjoint."""
    return not lat.member(a, c, d) and not lat.member(c, a, b)


class _CylinderSieve:
    """Running intersection of rotation-coding constraints, kept exact.

    Symbol j = 1 pins x to [P(-(j+1)), P(-j)) and symbol 0 to the
    complement.  Every cylinder of the coding is a single circular arc
    with lattice endpoints; it is stored as one or two linear fragments
    of [0, 1) (two exactly while the arc wraps through 0).
    """

    def __init__(self, lat: _ThetaLattice):
        self.lat = lat
        self.fed = 0
        self.frags = [(0, _ONE)]

    def feed(self, symbols) -> None:
        for sym in symbols:
            j = self.fed
            lo, hi = (-(j + 1), -j) if sym else (-j, -(j + 1))
            self.frags = self._meet(self._pieces(lo, hi))
            self.fed += 1
            if not self.frags:
                raise NotOnAttractor(
                    f"itinerary escapes every rotation cylinder at "
                    f"symbol {j}")

    def _pieces(self, lo, hi):
        if self.lat.cmp(lo, hi) < 0:
            return [(lo, hi)]
        out = []
        if self.lat.cmp(0, hi) < 0:
            out.append((0, hi))
        out.append((lo, _ONE))
        return out

    def _meet(self, pieces):
        lat = self.lat
        out = []
        for (a, b) in self.frags:
            for (c, d) in pieces:
                lo = a if lat.cmp(a, c) >= 0 else c
                hi = b if lat.cmp(b, d) <= 0 else d
                if lat.cmp(lo, hi) < 0:
                    out.append((lo, hi))
        if len(out) > 1:
            wrap = (len(out) == 2 and out[0][0] == 0
                    and out[-1][1] is _ONE)
            if not wrap:
                raise ValidationError(
                    "cylinder fragmented; constraints inconsistent")
        return out

    def arc(self):
        """The cylinder as a circular key arc (lo_key, hi_key)."""
        if self.fed == 0 or not self.frags:
            raise ValidationError("no cylinder available")
        if len(self.frags) == 2:
            return self.frags[1][0], self.frags[0][1]
        a, b = self.frags[0]
        return a, (0 if b is _ONE else b)


def _arc_ball_and_witness(lat: _ThetaLattice, a, b, prec: int):
    """Outer BallReal of the arc plus an exact interior witness (mod 1).

    A wrapping arc is enclosed on the shifted branch [P(a) - 1, P(b)):
    the digit series only sees x mod 1 and the integer part of the
    decomposition absorbs the shift.
    """
    wraps = lat.cmp(a, b) > 0
    ba = to_ball(lat.value(a), prec)
    bb = to_ball(lat.value(b), prec)
    lo = ba.lo - 1 if wraps else ba.lo
    enclosure = BallReal(lo, bb.hi, prec)
    k2 = Fraction(a + b, 2)
    c2 = Fraction(lat.floor(a) + lat.floor(b) + (1 if wraps else 0), 2)
    witness = affine_value(lat.theta, k2, -c2)
    shift = floor_exact(witness)
    if shift:
        witness = affine_value(witness, 1, -shift)
    return enclosure, witness


@dataclass(frozen=True)
class InterceptArc:
    """Exact cylinder arc recovered from a wrap itinerary: x lies in
    [lo, hi) circularly (through 0 when wraps is set); witness is an
    exact interior point reduced mod 1."""

    lo: object
    hi: object
    wraps: bool
    witness: object


def recover_intercept(itinerary: Word, theta) -> InterceptArc:
    """Exact arc of intercepts whose coding starts with the itinerary.

    Symbol j constrains frac(x + (j+1)*theta) -- the same dictionary that
    makes the wrap itinerary of a limit orbit equal the coding of its
    intercept.  An empty intersection raises NotOnAttractor.
    """
    if not isinstance(itinerary, Word) \
            or tuple(itinerary.alphabet) != (0, 1):
        raise ValidationError("itinerary must be a binary word")
    if len(itinerary) == 0:
        raise ValidationError("itinerary must be nonempty")
    if not is_exact(theta):
        raise ValidationError("theta must be exact")
    _require_slope(theta)
    lat = _ThetaLattice(theta)
    sieve = _CylinderSieve(lat)
    sieve.feed(itinerary.symbols)
    a, b = sieve.arc()
    _, witness = _arc_ball_and_witness(lat, a, b, 64)
    return InterceptArc(lat.value(a), lat.value(b),
                        lat.cmp(a, b) > 0, witness)


# -- decomposing limit points -------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """y = z + xi_0 - xi_(-x): intercept enclosure, integer part, and the
    certified residual |y - z - xi_0 + xi_(-x)|.  x_witness is an exact
    interior point of the recovered arc (mod 1); symbols_used counts the
    itinerary symbols consumed, which grow adaptively."""

    x_enclosure: BallReal
    z: int
    residual: BallReal
    x_witness: object
    symbols_used: int


@dataclass(frozen=True)
class SecondForm:
    """The intercept collapses onto the lattice Z*theta + Z: the quotient
    normal form with index m applies and gamma stays symbolic."""

    m: int
    gamma_note: str


class _BranchOrbit:
    """Wrap bits of the forward orbit of one point, extendable on demand."""

    def __init__(self, cr: ContractedRotation, y, prec: int):
        self.cr = cr
        self._y0 = y
        rl = _rational_of(cr.lam)
        rd = None if isinstance(cr.delta, BallReal) \
            else _rational_of(cr.delta)
        ry = None
        if isinstance(y, BallReal):
            if not (y.lo >= 0 and y.hi < 1):
                raise ValidationError("y enclosure must lie in [0, 1)")
            if y.lo == y.hi:
                ry = y.lo
        elif is_exact(y):
            if sign_exact(y) < 0 \
                    or sign_exact(affine_value(y, -1, 1)) <= 0:
                raise ValidationError("y must lie in [0, 1)")
            ry = _rational_of(y)
        else:
            raise ValidationError(f"unsupported y type {type(y).__name__}")
        self._exact = rl is not None and rd is not None and ry is not None
        self._n = 0
        if self._exact:
            self._rl, self._rd, self._x = rl, rd, ry
        else:
            self._wp = max(prec + 64, getattr(y, "prec", 0) + 32)
            self._strikes = 0
            self._bits = bytearray()
            self._x = to_ball(y, self._wp)

    def take(self, count: int) -> bytes:
        out = bytearray()
        while len(out) < count:
            if self._exact:
                y = self._rl * self._x + self._rd
                b = 1 if y >= 1 else 0
                self._x = y - b
                self._n += 1
            else:
                b = self._ball_step()
            out.append(b)
        return bytes(out)

    @property
    def certified(self) -> bytes:
        """Every wrap bit certified so far (ball mode), even when a later
        take() died mid-batch: the y enclosure has a definite itinerary
        exactly this far."""
        return b"" if self._exact else bytes(self._bits)

    def _ball_step(self) -> int:
        while True:
            t = to_ball(self.cr.lam, self._wp) * self._x \
                + to_ball(self.cr.delta, self._wp)
            c = t.compare(Fraction(1))
            if c is not None:
                b = 1 if c >= 0 else 0
                self._x = t - b
                self._bits.append(b)
                self._n += 1
                return b
            if self._strikes >= 3:
                raise ItineraryAmbiguous(
                    f"wrap bit at step {self._n} straddles the branch "
                    f"boundary at {self._wp} bits")
            self._strikes += 1
            self._wp *= 2
            self._replay()

    def _replay(self) -> None:
        x = to_ball(self._y0, self._wp)
        lb = to_ball(self.cr.lam, self._wp)
        db = to_ball(self.cr.delta, self._wp)
        for b in self._bits:
            x = lb * x + db - b
        self._x = x


def _pin_digit(lat: _ThetaLattice, a, b, n: int):
    """Ceiling digit c_n(-x) = [frac(x - n*theta) in [0, theta)] decided
    for the whole arc x in [P(a), P(b)): 1, 0, or None on a straddle."""
    sa, sb = a - n, b - n
    if _arc_subset(lat, sa, sb, 0, 1):
        return 1
    if _arc_disjoint(lat, sa, sb, 0, 1):
        return 0
    return None


def _obstruction_key(lat: _ThetaLattice, a, b, n: int):
    """Index m >= 1 of the lattice point frac(m*theta) blocking digit n,
    or None when no window edge is pinched inside the arc.

    The itinerary constraints only ever cut at negative-index lattice
    points, so once P(n) or P(n+1) sits strictly inside the arc, no
    number of further symbols separates its two sides and digit n stays
    undecided forever.  Without such a pinch the straddle is merely a
    matter of symbol supply.
    """
    sa, sb = a - n, b - n
    if lat.member(0, sa, sb) and lat.cmp(0, sa) != 0:
        return n
    if lat.member(1, sa, sb) and lat.cmp(1, sa) != 0:
        return n + 1
    return None


def decompose_limit_point(cr: ContractedRotation, y, n_symbols: int,
                          prec: int, *, theta):
    """Split a limit-set point as y = z + xi_0 - xi_(-x).

    theta is passed explicitly: (lam, delta) determines the angle only
    through the staircase inversion, so the caller supplies the angle it
    targeted.  The wrap itinerary of y pins the conjugacy intercept x
    into an exact cylinder arc, narrowed adaptively whenever a ceiling
    digit of -x is not constant across it; the xi values then use the
    pinned digits, so the residual enclosure is certified.

    The itinerary cuts the circle only at lattice points of negative
    index, so when frac(m*theta) with m >= 1 lies inside the arc, no
    number of symbols decides the digits at positions m-1 and m: the
    cylinder has pinched onto the orbit of 0, the degenerate case behind
    the quotient normal form.  When a digit stays undecided, the
    undetermined mass lam^n/(1-lam) is hulled into the xi enclosure if
    it is at most 2^-(prec//2) (an honestly widened residual); above
    that threshold a genuine pinch returns SecondForm(m, note) with
    gamma left symbolic, while a mere shortage of certified symbols
    (the y enclosure straddles a branch boundary too early) raises
    ItineraryAmbiguous.

    Raises NotOnAttractor when the itinerary matches no cylinder (y off
    the limit set).
    """
    if n_symbols < 4:
        raise ValidationError("need at least 4 itinerary symbols")
    if prec < 16:
        raise ValidationError("prec must be at least 16")
    if not is_exact(theta):
        raise ValidationError("theta must be exact")
    _require_slope(theta)
    orbit = _BranchOrbit(cr, y, prec)
    lat = _ThetaLattice(theta)
    sieve = _CylinderSieve(lat)
    exhausted = False
    amb_err = None

    def extend(count: int) -> None:
        nonlocal exhausted, amb_err
        try:
            sieve.feed(orbit.take(count))
        except ItineraryAmbiguous as err:
            # The y enclosure straddles a branch boundary at some step:
            # its itinerary simply stops there.  Keep the bits certified
            # before the straddle; they still cut the cylinder.
            exhausted = True
            amb_err = err
            fresh = orbit.certified[sieve.fed:]
            if fresh:
                sieve.feed(fresh)

    extend(n_symbols)
    if sieve.fed < 4:
        raise amb_err
    cap = max(8 * n_symbols, 4096)
    n_dig, tail_hi = _tail_digit_count(cr.lam, prec)
    digits = bytearray()
    n = 1
    while n <= n_dig:
        a, b = sieve.arc()
        d = _pin_digit(lat, a, b, n)
        if d is None:
            if not exhausted and sieve.fed < cap:
                extend(min(sieve.fed, cap - sieve.fed))
                continue
            lb = to_ball(cr.lam, 96)
            amb = (lb ** n / (1 - lb)).hi
            if amb <= Fraction(1, 1 << (prec // 2)):
                tail_hi = amb
                break
            m = _obstruction_key(lat, a, b, n)
            if m is None:
                if amb_err is not None:
                    raise amb_err
                raise ItineraryAmbiguous(
                    f"digit {n} of the intercept is still undecided "
                    f"after {sieve.fed} symbols")
            return SecondForm(m, (
                f"cylinder arc pinched onto frac({m}*theta): the "
                f"itinerary cannot separate its two sides, leaving "
                f"the digits from position {n} undetermined at mass "
                f"{float(amb):.3e}; gamma reported symbolically, "
                "not evaluated"))
        digits.append(d)
        n += 1
    wp = prec + 16
    xi_minus_x = _series_value(bytes(digits), cr.lam, tail_hi, wp)
    xi_zero = xi(Fraction(0), cr.lam, theta, wp)
    v = to_ball(y, wp) - xi_zero + xi_minus_x
    z = math.floor(v.mid + Fraction(1, 2))
    residual = abs(v - z)
    a, b = sieve.arc()
    enclosure, witness = _arc_ball_and_witness(lat, a, b, prec)
    return Decomposition(enclosure, z, residual, witness, sieve.fed)
