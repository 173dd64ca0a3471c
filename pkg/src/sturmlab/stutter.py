"""Finite-scale verifier for the stuttering conditions S1-S4.

Given a word u and a shift r, the mismatch set on a window [0, s] collects
the positions m with u_m != u_(m+r).  The conditions checked per record:

  S1  the window length s_n reaches w * r_n;
  S2  the mismatch set is a disjoint union of consecutive pairs {i, i+1};
  S4  each pair satisfies u_i + u_(i+1) = u_(i+r) + u_(i+r+1) exactly.

S3 concerns asymptotic gap growth and is not decidable from finite data: the
report carries raw trend tables (spread, minimal inter-leader gap, margins,
log r_n) and never a boolean for it.

For words generated as (combinations of) codings, every mismatch position is
additionally classified by exact interval membership: with p the nearest
integer to r*theta and eps = r*theta - p, position m is explained by the
coding of x_ell when frac(x_ell + (m + origin)*theta) lies in

    eps > 0:  condition (i)  [1 - |eps|, 1)     condition (ii)  [theta - |eps|, theta)
    eps < 0:  condition (i)  [0, |eps|)         condition (ii)  [theta, theta + |eps|)

(the leader of a pair lands in window (i), its successor in window (ii)).
Window endpoints are affine in theta, so every membership is an exact sign
test.  Shift lists default to the positive-side convergent denominators of
the slope; raw words take a caller-supplied list so any reading of the
witness shifts can be exercised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log

from .confrac import positive_side_denominators
from .errors import (
    IndexOutOfRange,
    NotPaired,
    NoWindow,
    PrefixTooShort,
    ValidationError,
)
from .kernel import (
    Window,
    exact_add,
    floor_exact,
    frac,
    sign_exact,
    values_equal,
    window_member_exact,
)
from .kernel.ops import affine_value
from .words import NONDEGENERACY_BOUND, CodingSpec, Word, linear_combination


def mismatch_set(word: Word, r: int, s: int) -> list:
    """Positions m in [0, s] with word[m] != word[m + r]."""
    if r < 1:
        raise ValidationError("shift r must be at least 1")
    if s < 0:
        raise ValidationError("window end s must be nonnegative")
    if r + s >= len(word):
        raise PrefixTooShort(f"need positions up to {r + s}, "
                             f"word has {len(word)}")
    sym = word.symbols
    return [m for m in range(s + 1) if sym[m] != sym[m + r]]


def max_window(word: Word, r: int, max_mismatches: int):
    """Greatest s with at most max_mismatches mismatches on [0, s].

    Returns (s, truncated); truncated means the prefix, not the budget,
    stopped growth.  A mismatch at position 0 with budget 0 leaves no valid
    window at all.
    """
    if r < 1:
        raise ValidationError("shift r must be at least 1")
    if max_mismatches < 0:
        raise ValidationError("mismatch budget must be nonnegative")
    if len(word) <= r:
        raise PrefixTooShort(f"need more than {r} symbols, "
                             f"word has {len(word)}")
    sym = word.symbols
    count = 0
    for m in range(len(word) - r):
        if sym[m] != sym[m + r]:
            count += 1
            if count > max_mismatches:
                if m == 0:
                    raise NoWindow("mismatch at position 0 exceeds the budget")
                return m - 1, False
    return len(word) - r - 1, True


def pair_structure(delta) -> list:
    """Leaders i of the {i, i+1} blocks forming delta; raises otherwise."""
    delta = list(delta)
    if delta != sorted(set(delta)):
        raise ValidationError("mismatch positions must be sorted and unique")
    leaders = []
    j = 0
    while j < len(delta):
        if j + 1 < len(delta) and delta[j + 1] == delta[j] + 1:
            leaders.append(delta[j])
            j += 2
        else:
            raise NotPaired(delta[j])
    return leaders


def check_s4(word: Word, r: int, leaders) -> list:
    """Per leader i: u_i + u_(i+1) == u_(i+r) + u_(i+r+1), exactly."""
    out = []
    for i in leaders:
        if i < 0 or i + r + 1 >= len(word):
            raise IndexOutOfRange(f"leader {i} needs position {i + r + 1}, "
                                  f"word has {len(word)}")
        a = word.alphabet
        lhs = exact_add(a[word[i]], a[word[i + 1]])
        rhs = exact_add(a[word[i + r]], a[word[i + r + 1]])
        out.append(values_equal(lhs, rhs))
    return out


# -- classification by interval membership ------------------------------------

@dataclass(frozen=True)
class ClassifiedPosition:
    position: int
    ell: object            # spec index, or None when unexplained
    condition: object      # "i" / "ii" / None
    matches: tuple          # every (ell, condition) that matched


@dataclass(frozen=True)
class MismatchClassification:
    entries: tuple
    unexplained: tuple      # positions no window explains
    warnings: tuple         # uniqueness violations etc.


def _signed_shift_distance(theta, r: int):
    """(side, p) with side = sign(r*theta - p), p the nearest integer."""
    p = floor_exact(affine_value(theta, r, Fraction(1, 2)))
    side = sign_exact(affine_value(theta, r, -p))
    return side, p


def classify_mismatches(specs, r: int, delta) -> MismatchClassification:
    """Explain each mismatch position by a coding index and window.

    specs must share the slope and origin that produced the word the
    mismatches came from.
    """
    specs = list(specs)
    theta = specs[0].theta
    for spec in specs[1:]:
        if not values_equal(spec.theta, theta):
            raise ValidationError("codings must share the slope")
        if spec.index_origin != specs[0].index_origin:
            raise ValidationError("codings must share the index origin")
    origin = specs[0].index_origin
    side, p = _signed_shift_distance(theta, r)
    sr, sp = side * r, side * p
    # |eps| = side*(r*theta - p); window edges are affine in theta
    if sign_exact(affine_value(theta, 1 - sr, sp)) < 0 \
            or sign_exact(affine_value(theta, -1 - sr, 1 + sp)) < 0:
        raise ValidationError("shift distance exceeds min(theta, 1 - theta); "
                              "windows would overlap")
    if side > 0:
        win_i = Window(affine_value(theta, -sr, 1 + sp), Fraction(1))
        win_ii = Window(affine_value(theta, 1 - sr, sp), theta)
    else:
        win_i = Window(Fraction(0), affine_value(theta, sr, -sp))
        win_ii = Window(theta, affine_value(theta, 1 + sr, -sp))
    entries = []
    unexplained = []
    warnings = []
    for m in delta:
        matches = []
        for ell, spec in enumerate(specs):
            if spec.x is theta:
                point = frac(affine_value(theta, m + origin + 1, 0))
            else:
                point = frac(exact_add(spec.x,
                                       affine_value(theta, m + origin, 0)))
            if window_member_exact(point, win_i):
                matches.append((ell, "i"))
            elif window_member_exact(point, win_ii):
                matches.append((ell, "ii"))
        if not matches:
            unexplained.append(m)
            entries.append(ClassifiedPosition(m, None, None, ()))
            continue
        if len(matches) > 1:
            warnings.append(f"position {m}: {len(matches)} codings match "
                            f"({matches}); expected at most one")
        entries.append(ClassifiedPosition(m, matches[0][0], matches[0][1],
                                          tuple(matches)))
    return MismatchClassification(tuple(entries), tuple(unexplained),
                                  tuple(warnings))


# -- the assembled witness -----------------------------------------------------

@dataclass(frozen=True)
class StutterRecord:
    n: int
    r: int
    s: int
    truncated: bool
    delta: tuple
    leaders: object         # tuple of pair leaders, or None if unpaired
    d_observed: int
    s1_holds: object        # bool, or None when prefix-capped undecidable
    s2_pairs_ok: bool
    s4_holds: object        # bool over leaders, or None without pairs
    s4_per_leader: object
    classification: object  # MismatchClassification or None (raw mode)
    spread: object          # i_last - i_first over leaders
    gap_min: object         # minimal consecutive leader gap
    first_margin: object    # i_first - 0
    last_margin: object     # s - i_last
    log_r: float


@dataclass(frozen=True)
class StutterWitness:
    w: Fraction
    d: int
    records: tuple
    diagnostics: dict
    note: str = ""


def stutter_report(source, w, n_max: int, prefix_len: int, *,
                   coeffs=None, r_list=None, d=None,
                   bound: int = NONDEGENERACY_BOUND) -> StutterWitness:
    """Assemble records for n = 0..n_max.

    ``source`` is either a list of CodingSpec (the word is their linear
    combination, shifts default to the slope's positive-side denominators,
    d = (k+1)*ceil(w)) or a raw Word (caller supplies r_list; d defaults to
    2 and the observed pair count is reported alongside).
    """
    w = Fraction(w)
    if w <= 0:
        raise ValidationError("w must be a positive rational")
    if n_max < 0:
        raise ValidationError("n_max must be nonnegative")
    specs = None
    if isinstance(source, Word):
        word = Word(source.alphabet, source.symbols[:prefix_len],
                    source.origin_note)
        if r_list is None:
            raise ValidationError("raw words need an explicit shift list")
        d_eff = 2 if d is None else d
        note = "raw word mode: shifts supplied, d not derived from (k, w)"
    else:
        specs = [s if isinstance(s, CodingSpec) else CodingSpec(*s)
                 for s in source]
        k = len(specs)
        if coeffs is None:
            coeffs = (0,) + (1,) * k
        word = linear_combination(specs, coeffs, prefix_len, bound=bound)
        if r_list is None:
            r_list = positive_side_denominators(specs[0].theta, n_max + 1)
        d_eff = (k + 1) * ceil(w) if d is None else d
        note = f"spec mode: d = (k+1)*ceil(w) with k = {k}"
    if len(r_list) < n_max + 1:
        raise ValidationError(f"need {n_max + 1} shifts, got {len(r_list)}")
    budget = 2 * d_eff
    records = []
    for n in range(n_max + 1):
        r = int(r_list[n])
        s, truncated = max_window(word, r, budget)
        delta = tuple(mismatch_set(word, r, s))
        try:
            leaders = tuple(pair_structure(delta))
            s2 = True
        except NotPaired:
            leaders, s2 = None, False
        s1 = True if Fraction(s) >= w * r else (None if truncated else False)
        s4_list = s4 = None
        if leaders is not None and leaders:
            s4_list = tuple(check_s4(word, r, leaders))
            s4 = all(s4_list)
        elif leaders is not None:
            s4_list, s4 = (), True  # vacuous
        cls = classify_mismatches(specs, r, delta) if specs else None
        spread = gap_min = first_margin = last_margin = None
        if leaders:
            spread = leaders[-1] - leaders[0]
            first_margin = leaders[0]
            last_margin = s - leaders[-1]
            if len(leaders) > 1:
                gap_min = min(b - a for a, b in zip(leaders, leaders[1:]))
        records.append(StutterRecord(
            n=n, r=r, s=s, truncated=truncated, delta=delta, leaders=leaders,
            d_observed=len(leaders) if leaders is not None else 0,
            s1_holds=s1, s2_pairs_ok=s2, s4_holds=s4, s4_per_leader=s4_list,
            classification=cls, spread=spread, gap_min=gap_min,
            first_margin=first_margin, last_margin=last_margin,
            log_r=log(r)))
    diagnostics = {
        "spread": [rec.spread for rec in records],
        "gap_min": [rec.gap_min for rec in records],
        "first_margin": [rec.first_margin for rec in records],
        "last_margin": [rec.last_margin for rec in records],
        "log_r": [rec.log_r for rec in records],
    }
    return StutterWitness(w=w, d=d_eff, records=tuple(records),
                          diagnostics=diagnostics, note=note)
