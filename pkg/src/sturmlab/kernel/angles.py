"""Certified membership of rotation orbits in circle arcs.

The question answered here, many times over: is ``frac(x + n*theta)`` inside
the half-open arc ``[lo, hi)``?  Deciding each position with exact algebraic
arithmetic is rigorous but slow, so positions are screened through an integer
grid first.

Error model.  Fix ``B`` bits and ``M = 2**B``.  With ``T = floor(theta*M)``
and ``X0 = floor(x*M)`` the scaled true point satisfies

    frac(x + n*theta) * M  in  [C_n, C_n + n + 1]  (cyclically),
    C_n = (X0 + n*T) mod M,

because the two floors each drop less than one unit and the theta error is
paid ``n`` times.  Arc endpoints are localized the same way
(``lo*M in [A_lo, A_lo+1)``), so comparing integers with a +-1 safety margin
certifies membership except for points within ``~n`` grid cells of an
endpoint.  Those few fall back to exact sign tests, which also settle
boundary hits exactly (a hit counts as inside only if the matching
``include_*`` flag says so).  If too many positions fall back, the grid is
rebuilt with twice the bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ValidationError
from .algebraic import AlgebraicNumber
from .ops import exact_add, exact_mul, floor_exact, frac, is_exact, sign_exact


@dataclass(frozen=True)
class Window:
    """Arc [lo, hi) on the unit circle, with boundary overrides.

    include_zero adds the single point 0 to the arc (used by digit rules that
    treat an exact lattice hit specially).
    """

    lo: object
    hi: object
    include_lo: bool = True
    include_hi: bool = False
    include_zero: bool = False


def _as_signed(value):
    if isinstance(value, int):
        return Fraction(value)
    return value


def window_member_exact(v, win: Window) -> bool:
    """Exact membership of an exact point v in [0, 1)."""
    if win.include_zero and sign_exact(v) == 0:
        return True
    slo = sign_exact(exact_add(v, exact_mul(-1, _as_signed(win.lo))))
    if slo < 0 or (slo == 0 and not win.include_lo):
        return False
    shi = sign_exact(exact_add(v, exact_mul(-1, _as_signed(win.hi))))
    return shi < 0 or (shi == 0 and win.include_hi)


class AngleGrid:
    """Screened evaluation of frac(x + n*theta) for exact x, theta."""

    def __init__(self, theta, x=0, bits: int = None):
        if not (is_exact(theta) and is_exact(x)):
            raise ValidationError("grid parameters must be exact values")
        self.theta = theta
        self.x = x
        self._bits = bits
        self._cache = {}

    # -- exact side -----------------------------------------------------

    def exact_point(self, n: int):
        """frac(x + n*theta), exactly."""
        if self.x is self.theta:
            total = exact_mul(n + 1, self.theta)
        else:
            total = exact_add(self.x, exact_mul(n, self.theta))
        return frac(total)

    # -- integer side ----------------------------------------------------

    def _setup(self, bits: int):
        if bits not in self._cache:
            m = 1 << bits
            t = floor_exact(exact_mul(self.theta, m))
            x0 = floor_exact(exact_mul(self.x, m))
            self._cache[bits] = (m, t % m, x0 % m)
        return self._cache[bits]

    @staticmethod
    def _edges(win: Window, bits: int):
        m = 1 << bits
        a_lo = floor_exact(exact_mul(_as_signed(win.lo), m))
        a_hi = floor_exact(exact_mul(_as_signed(win.hi), m))
        return a_lo, a_hi  # a_hi == m exactly when hi == 1

    def indicator(self, win: Window, n_start: int, count: int,
                  max_fallbacks: int = None):
        """bytearray of 0/1 for n = n_start .. n_start+count-1.

        Returns (bits, fallback_positions); exact boundary hits are resolved
        per the window's include flags and are not charged to the fallback
        budget for grid escalation.
        """
        n_top = n_start + count
        bits = self._bits or (2 * max(n_top, 2).bit_length() + 48)
        budget = max_fallbacks if max_fallbacks is not None \
            else max(8, count // 256)
        for _attempt in range(5):
            out, pending = self._screen(win, n_start, count, bits)
            if len(pending) <= budget:
                break
            bits *= 2
        hits = []
        for idx, n in pending:
            v = self.exact_point(n)
            out[idx] = 1 if window_member_exact(v, win) else 0
            hits.append(n)
        return out, hits

    def _screen(self, win: Window, n_start: int, count: int, bits: int):
        m, t, x0 = self._setup(bits)
        a_lo, a_hi = self._edges(win, bits)
        w_in = (a_hi - a_lo) % m
        w_out = (a_lo - a_hi) % m
        out = bytearray(count)
        pending = []
        c = (x0 + n_start * t) % m
        for idx in range(count):
            n = n_start + idx
            span = n + 2  # n + 1 error units, one more for safety
            d = (c - a_lo) % m
            if 1 <= d and d + span < w_in:
                out[idx] = 1
            else:
                e = (c - a_hi) % m
                if not (1 <= e and e + span < w_out):
                    pending.append((idx, n))
            c = (c + t) % m
        return out, pending

    def decide(self, win: Window, n: int) -> bool:
        """Single-position membership (exact fallback as needed)."""
        bits_vec, _ = self.indicator(win, n, 1)
        return bool(bits_vec[0])
