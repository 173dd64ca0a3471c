"""Rotation codings, the Fibonacci word, and subword diagnostics.

A coding of ``x`` with slope ``theta`` is the 0/1 sequence
``u_n = 1  iff  frac(x + n*theta) in [0, theta)``, half-open exactly as
written.  Output words are indexed from a chosen origin: position ``j`` of
``theta_coding(spec, N)`` holds ``u_(j + spec.index_origin)``.  The origin
default is 1; the characteristic word of slope theta is the coding of
``x = 0``.

Membership decisions go through the screened integer grid
(:class:`~sturmlab.kernel.AngleGrid`) for exact inputs -- every emitted symbol
is exact, boundary hits included.  Ball inputs are decided per position and
raise :class:`~sturmlab.errors.Indeterminate` on the first symbol the
enclosure cannot certify.

Words are immutable; generation over disjoint index ranges concatenates
deterministically (``start`` parameter).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DegenerateDifference,
    Indeterminate,
    SharedThetaViolation,
    ValidationError,
    WindowTooLong,
)
from .kernel import (
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
    values_equal,
)
from .kernel.algebraic import AlgebraicNumber
from .kernel.ops import affine_value

NONDEGENERACY_BOUND = 10 ** 6


def _is_rational_value(v) -> bool:
    return isinstance(v, (int, Fraction)) or (
        isinstance(v, AlgebraicNumber) and v.is_rational)


@dataclass(frozen=True)
class CodingSpec:
    """Slope, starting point, and index origin of one coding."""

    theta: object
    x: object = 0
    index_origin: int = 1

    def __post_init__(self):
        if self.index_origin not in (0, 1):
            raise ValidationError("index_origin must be 0 or 1")
        t = self.theta
        if _is_rational_value(t):
            raise ValidationError("slope must be irrational")
        if is_exact(t):
            if t.sign_exact() <= 0 or t.affine(-1, 1).sign_exact() <= 0:
                raise ValidationError("slope must lie strictly in (0, 1)")
        elif isinstance(t, BallReal):
            # irrationality of a raw enclosure is unverifiable; range is
            if not (t.lo > 0 and t.hi < 1):
                raise ValidationError("slope enclosure must lie in (0, 1)")
        else:
            raise ValidationError(f"unsupported slope type {type(t).__name__}")
        x = self.x
        if is_exact(x):
            if sign_exact(x) < 0 or sign_exact(affine_value(x, -1, 1)) <= 0:
                raise ValidationError("x must lie in [0, 1)")
        elif isinstance(x, BallReal):
            if not (x.lo >= 0 and x.hi < 1):
                raise ValidationError("x enclosure must lie in [0, 1)")
        else:
            raise ValidationError(f"unsupported x type {type(x).__name__}")


@dataclass(frozen=True)
class Word:
    """Immutable word: symbol bytes indexing an exact, certified-distinct
    alphabet."""

    alphabet: tuple
    symbols: bytes
    origin_note: str = ""

    def __post_init__(self):
        if self.symbols and max(self.symbols) >= len(self.alphabet):
            raise ValidationError("symbol index outside the alphabet")
        for i in range(len(self.alphabet)):
            for j in range(i + 1, len(self.alphabet)):
                if values_equal(self.alphabet[i], self.alphabet[j]):
                    raise ValidationError("alphabet values must be distinct")

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    @property
    def is_binary(self) -> bool:
        return tuple(self.alphabet) == (0, 1)

    def to_line(self) -> str:
        if not self.is_binary:
            raise ValidationError("line form is for binary words only")
        return self.symbols.decode("ascii").translate(
            str.maketrans("\x00\x01", "01"))


def theta_coding(spec: CodingSpec, length: int, start: int = 0) -> Word:
    """Positions start..start+length-1 of the coding defined by ``spec``."""
    if length < 0 or start < 0:
        raise ValidationError("length and start must be nonnegative")
    note = (f"coding of x with index origin {spec.index_origin}"
            + (f", positions from {start}" if start else ""))
    if length == 0:
        return Word((0, 1), b"", note)
    n0 = spec.index_origin + start
    if is_exact(spec.theta) and is_exact(spec.x):
        grid = AngleGrid(spec.theta, spec.x)
        window = Window(Fraction(0), spec.theta)
        bits, _ = grid.indicator(window, n0, length)
        return Word((0, 1), bytes(bits), note)
    theta_b = to_ball(spec.theta)
    out = bytearray(length)
    for j in range(length):
        v = frac(_ball_point(spec.x, spec.theta, n0 + j, theta_b.prec))
        c = v.compare(theta_b)
        if c is None:
            raise Indeterminate(f"membership at position {j} is not certified "
                                "by the enclosure width")
        out[j] = 1 if c < 0 else 0
    return Word((0, 1), bytes(out), note + "; ball-certified")


def _ball_point(x, theta, n: int, prec: int) -> BallReal:
    return to_ball(x, prec) + to_ball(theta, prec) * n


def characteristic_word(theta, length: int, index_origin: int = 1) -> Word:
    """Coding of x = 0: the characteristic word of the given slope."""
    return theta_coding(CodingSpec(theta, 0, index_origin), length)


def fibonacci_word(length: int) -> Word:
    """Prefix of the limit of f_0 = 0, f_1 = 01, f_n = f_(n-1) f_(n-2)."""
    if length < 0:
        raise ValidationError("length must be nonnegative")
    a, b = b"\x00", b"\x00\x01"
    while len(b) < length:
        a, b = b, b + a
    return Word((0, 1), b[:length], "fibonacci recurrence f0=0, f1=01")


def subword_complexity(word: Word, n: int) -> int:
    """Number of distinct length-n factors of the given finite word."""
    if n > len(word):
        raise WindowTooLong(f"factor length {n} exceeds word length {len(word)}")
    if n == 0:
        return 1
    s = word.symbols
    return len({s[i:i + n] for i in range(len(s) - n + 1)})


@dataclass(frozen=True)
class ComplexityEntry:
    n: int
    count: int
    windows: int
    censored: bool          # too few windows to trust a low count
    periodic_suspect: bool  # count <= n with censoring excluded


def complexity_profile(word: Word, n_max: int) -> list:
    """Counts for n = 1..n_max with censoring and periodicity flags.

    A count of at most n is only evidence of ultimate periodicity when the
    prefix offers enough windows that truncation cannot explain it; the
    cutoff used is windows >= 2 (n + 1).
    """
    out = []
    for n in range(1, n_max + 1):
        count = subword_complexity(word, n)
        windows = len(word) - n + 1
        censored = windows < 2 * (n + 1)
        out.append(ComplexityEntry(n, count, windows, censored,
                                   count <= n and not censored))
    return out


def letter_frequency(word: Word, symbol: int = 1) -> Fraction:
    if not len(word):
        raise ValidationError("frequency of an empty word")
    return Fraction(word.symbols.count(symbol), len(word))


@dataclass(frozen=True)
class SlopeReport:
    """Measured 1-frequency against the two natural slope candidates.

    The golden-rotation coding has 1-frequency (3 - sqrt5)/2 = 1/phi^2 while
    1/phi is the other constant commonly quoted for the same word; both
    distances are reported and neither is asserted.
    """

    measured: Fraction
    candidates: tuple       # ((label, value, |measured - value| ball), ...)
    closest: str


def slope_report(word: Word) -> SlopeReport:
    measured = letter_frequency(word, 1)
    cands = (
        ("(3-sqrt5)/2", AlgebraicNumber.from_quadratic(3, -1, 5, 2)),
        ("1/phi", AlgebraicNumber.from_quadratic(-1, 1, 5, 2)),
    )
    rows = []
    for label, value in cands:
        gap = abs(value.affine(-1, measured).refine(64))
        rows.append((label, value, gap))
    closest = min(rows, key=lambda row: row[2].mid)[0]
    return SlopeReport(measured, tuple(rows), closest)


# -- linear combinations ------------------------------------------------------

def _difference_in_theta_lattice(diff, theta, bound: int):
    """Search a = -bound..bound for diff - a*theta integer; exact verdicts.

    Returns (a, b) for a hit, None otherwise.  diff and theta must be exact.
    Screening walks scaled residues incrementally; every candidate is
    confirmed with exact arithmetic before it counts.
    """
    if _is_rational_value(diff):
        d = diff if isinstance(diff, Fraction) else Fraction(
            diff if isinstance(diff, int) else diff.rational_value)
        return (0, int(d)) if d.denominator == 1 else None
    bits = 2 * max(bound.bit_length(), 1) + 48
    m = 1 << bits
    t = floor_exact(affine_value(theta, m, 0))
    z = floor_exact(affine_value(diff, m, 0))
    hits = []
    c = z % m
    for a in range(bound + 1):
        # true value of frac(diff - a*theta)*m lies in [c - a - 1, c + a + 1]
        if c <= a + 1 or c >= m - a - 1:
            hits.append(a)
        c = (c - t) % m
    c = (z + t) % m
    for a in range(-1, -bound - 1, -1):
        if c <= -a + 1 or c >= m + a - 1:
            hits.append(a)
        c = (c + t) % m
    for a in hits:
        e = exact_add(diff, affine_value(theta, -a, 0))
        if _is_rational_value(e):
            ef = e if isinstance(e, Fraction) else Fraction(
                e if isinstance(e, int) else e.rational_value)
            if ef.denominator == 1:
                return a, int(ef)
    return None


def linear_combination(specs, coeffs, length: int,
                       bound: int = NONDEGENERACY_BOUND) -> Word:
    """Word with values c_0 + sum_i c_i u_n^(i) over the shared slope.

    coeffs is (c_0, ..., c_k) with k = len(specs).  All specs must share the
    slope and the index origin exactly.  Pairwise nondegeneracy
    (x_i - x_j not in Z*theta + Z) is proven within |a| <= bound for exact
    starting points and left unverified for ball inputs; the outcome is
    recorded in the word's origin note.
    """
    specs = list(specs)
    coeffs = list(coeffs)
    if len(coeffs) != len(specs) + 1:
        raise ValidationError(f"expected {len(specs) + 1} coefficients "
                              f"for {len(specs)} codings")
    for s in specs[1:]:
        if not _same_value(s.theta, specs[0].theta):
            raise SharedThetaViolation("codings must share the slope exactly")
        if s.index_origin != specs[0].index_origin:
            raise ValidationError("codings must share the index origin")
    notes = []
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            if is_exact(specs[i].x) and is_exact(specs[j].x):
                d = exact_add(specs[i].x,
                              affine_value(specs[j].x, -1, 0))
                hit = _difference_in_theta_lattice(d, specs[0].theta, bound)
                if hit is not None:
                    raise DegenerateDifference(
                        f"x_{i} - x_{j} = {hit[0]}*theta + {hit[1]}")
            else:
                notes.append(f"x_{i} - x_{j} unverified (ball input)")
    if not notes:
        notes.append(f"nondegeneracy checked to |a| <= {bound}"
                     if len(specs) > 1 else "single coding")
    codings = [theta_coding(s, length) for s in specs]
    k = len(specs)
    mask_values = {}
    for mask in range(1 << k):
        v = coeffs[0]
        for i in range(k):
            if mask >> i & 1:
                v = exact_add(v, coeffs[i + 1])
        mask_values[mask] = v
    seen_masks = sorted({
        sum(codings[i][n] << i for i in range(k)) for n in range(length)
    }) or [0]
    # dedupe equal values across masks, then order the alphabet numerically
    reps = []
    mask_to_rep = {}
    for mask in seen_masks:
        for r, rep_mask in enumerate(reps):
            if values_equal(mask_values[mask], mask_values[rep_mask]):
                mask_to_rep[mask] = r
                break
        else:
            mask_to_rep[mask] = len(reps)
            reps.append(mask)
    order = sorted(range(len(reps)),
                   key=lambda r: _sort_key(mask_values[reps[r]]))
    rank = {r: pos for pos, r in enumerate(order)}
    alphabet = tuple(mask_values[reps[r]] for r in order)
    if length:
        symbols = bytes(
            rank[mask_to_rep[sum(codings[i][n] << i for i in range(k))]]
            for n in range(length))
    else:
        symbols = b""
    return Word(alphabet, symbols,
                f"linear combination of {k} coding(s); " + "; ".join(notes))


def _same_value(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return values_equal(a, b)
    return a is b


def _sort_key(v):
    return to_ball(v, 64).mid
