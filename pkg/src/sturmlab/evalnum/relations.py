"""Integer-relation probing by exact lattice reduction.

The classic rig: embed (e_i | W * v_i) as lattice rows with W = 2^prec, so a
true relation Sigma m_i v_i = 0 with small |m_i| leaves a short vector whose
weight coordinate is only the scaled enclosure slop, while spurious
combinations keep a length on the order of W.  Reduction is an integral LLL
(delta = 3/4) -- all state is integer (the lambda/d representation of the
Gram-Schmidt data), so the run is deterministic and exact, never a float
heuristic.  Complex values contribute two weight columns (real and
imaginary scaled separately); a relation must kill both.

A found relation is re-scored against the original enclosures and reported
with its residual ball.  A miss is reported as :class:`NoneBelowBound`
carrying the standard exclusion bound ||b_1|| / 2^((n-1)/2) <= lambda_1 --
explicitly a "nothing found below the bound at this precision" statement,
never an independence proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, isqrt, log2

from ..errors import PrecisionTooLow, ValidationError
from ..kernel import BallComplex, BallReal
from .numbers import Base

__all__ = ["Relation", "NoneBelowBound", "BaseRelation",
           "integer_relation", "relation_over_base", "lll_reduce"]


# ---------------------------------------------------------------------------
# integral LLL


def lll_reduce(rows, delta_num: int = 3, delta_den: int = 4):
    """LLL-reduce integer row vectors, exactly.

    Implements the all-integer lambda/d bookkeeping, so no Fractions appear;
    rows must be linearly independent.  Returns a new list of rows.
    """
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n < 2:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    lam = [[0] * n for _ in range(n)]
    d = [1] * (n + 1)
    for i in range(n):
        for j in range(i + 1):
            u = dot(b[i], b[j])
            for k in range(j):
                u = (d[k + 1] * u - lam[i][k] * lam[j][k]) // d[k]
            if j < i:
                lam[i][j] = u
            else:
                if u <= 0:
                    raise ValidationError("lattice rows are linearly dependent")
                d[i + 1] = u

    def size_reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            for idx in range(len(b[k])):
                b[k][idx] -= q * b[l][idx]
            for j in range(l):
                lam[k][j] -= q * lam[l][j]
            lam[k][l] -= q * d[l + 1]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        bb = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (bb * t + mu * lam[i][k]) // d[k + 1]
        d[k] = bb

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if (delta_den * (d[k - 1] * d[k + 1] + lam[k][k - 1] ** 2)
                < delta_num * d[k] * d[k]):
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1
    return b


# ---------------------------------------------------------------------------
# relation search


@dataclass(frozen=True)
class Relation:
    """A nonzero integer vector m with |Sigma m_i v_i| below the threshold."""

    coeffs: tuple
    residual: BallReal
    height_bound: int
    prec: int


@dataclass(frozen=True)
class NoneBelowBound:
    """Nothing found: no relation with |m|_inf <= height_bound surfaced at
    this precision.  Not an independence proof."""

    certificate_norm: str
    height_bound: int
    prec: int
    message: str = "no relation found below bound at this precision"


def _as_rect(v, prec: int) -> BallComplex:
    if isinstance(v, BallComplex):
        return v
    if isinstance(v, BallReal):
        return BallComplex.from_real(v)
    if isinstance(v, (int, Fraction)):
        return BallComplex.exact(v, 0, prec)
    raise ValidationError(f"unsupported value type {type(v).__name__}")


def _scaled_mid(fr: Fraction, scale: int) -> int:
    return (2 * fr.numerator * scale + fr.denominator) // (2 * fr.denominator)


def integer_relation(values, height_bound: int, prec: int):
    """Search for integer m, 0 < |m|_inf <= height_bound, with
    |Sigma m_i v_i| <= 2^(-prec/2).

    Values must carry radii at most 2^(-prec) (else PrecisionTooLow), and
    the height bound must leave the detection threshold meaningful:
    n * height_bound * 2^(-prec) has to stay below a quarter of it.
    """
    values = list(values)
    n = len(values)
    if n < 2:
        raise ValidationError("relation search needs at least two values")
    if height_bound < 1:
        raise ValidationError("height bound must be positive")
    rects = [_as_rect(v, prec) for v in values]
    max_rad = Fraction(1, 1 << prec)
    for i, r in enumerate(rects):
        if r.re.rad > max_rad or r.im.rad > max_rad:
            raise PrecisionTooLow(
                f"value {i} has radius above 2^-{prec}; cannot probe at this precision")
    eps = Fraction(1, 1 << (prec // 2))
    if Fraction(n * height_bound, 1 << prec) > eps / 4:
        raise PrecisionTooLow(
            "height bound too large for this precision (noise would mask relations)")

    complex_mode = any(not r.im.contains_zero() or r.im.rad > 0 for r in rects)
    scale = 1 << prec
    rows = []
    for i, r in enumerate(rects):
        row = [0] * n
        row[i] = 1
        row.append(_scaled_mid(r.re.mid, scale))
        if complex_mode:
            row.append(_scaled_mid(r.im.mid, scale))
        rows.append(row)

    reduced = lll_reduce(rows)

    best = None
    for row in reduced:
        m = row[:n]
        if all(c == 0 for c in m):
            continue
        if max(abs(c) for c in m) > height_bound:
            continue
        combo = BallComplex.exact(0, 0, prec)
        for c, r in zip(m, rects):
            if c:
                combo = combo + r * c
        residual = abs(combo)
        if residual.lo <= eps:
            if best is None or residual.mid < best[0]:
                best = (residual.mid, m, residual)
    if best is not None:
        _, m, residual = best
        lead = next(c for c in m if c != 0)
        if lead < 0:
            m = [-c for c in m]
        return Relation(coeffs=tuple(m), residual=residual,
                        height_bound=height_bound, prec=prec)

    norm_sq = sum(x * x for x in reduced[0])
    cert_sq = norm_sq >> (n - 1)  # (lambda_1)^2 >= ||b_1||^2 / 2^(n-1)
    return NoneBelowBound(certificate_norm=str(isqrt(cert_sq)),
                          height_bound=height_bound, prec=prec)


@dataclass(frozen=True)
class BaseRelation:
    """Relation with coefficients Sigma_s a_{i,s} beta^s applied to value i."""

    coeffs: tuple  # coeffs[i][s], grouped per value
    residual: BallReal
    degree_bound: int
    height_bound: int
    prec: int


def relation_over_base(values, base: Base, degree_bound: int,
                       height_bound: int, prec: int):
    """Search for Z[beta]-coefficients (degree < degree_bound) against values.

    Flattens to an integer search over {beta^s * v_i} and regroups.  The
    probing precision degrades with the size of |beta|^s factors; the
    effective precision actually achieved is reported in the result.
    """
    if degree_bound < 1:
        raise ValidationError("degree bound must be at least 1")
    t = degree_bound
    wp = prec + t * (int(ceil(log2(float(base.modulus_upper)))) + 1) + 48
    rects = [_as_rect(v, wp) for v in values]
    flat = []
    for r in rects:
        for s in range(t):
            power = base.rect(base.beta_elem().pow(s), wp)
            flat.append(power * r)
    worst = max(max(f.re.rad, f.im.rad) for f in flat)
    p_eff = prec
    while worst > Fraction(1, 1 << p_eff) and p_eff > 0:
        p_eff -= 1
    if p_eff < 32:
        raise PrecisionTooLow("|beta|^s growth consumed the working precision")
    out = integer_relation(flat, height_bound, p_eff)
    if isinstance(out, NoneBelowBound):
        return out
    grouped = tuple(tuple(out.coeffs[i * t:(i + 1) * t])
                    for i in range(len(values)))
    return BaseRelation(coeffs=grouped, residual=out.residual,
                        degree_bound=t, height_bound=height_bound, prec=p_eff)
