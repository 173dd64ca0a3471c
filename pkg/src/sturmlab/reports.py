"""Report serialization: canonical JSON, exact-value encoding, CSV plot
exports, and optional matplotlib renderings of the exported tables.

Exact numbers never pass through floats: integers and rationals are emitted
as strings, balls as {mid, rad, bits} with exact decimal strings (falling
back to p/q when a midpoint is not decimal-terminating).  JSON is dumped
with sorted keys and fixed separators so identical reports are identical
bytes; anything time-dependent stays out of the report body.
"""

import csv
import dataclasses
import io
import json
from fractions import Fraction

from .errors import UnknownKind, ValidationError
from .kernel import AlgebraicNumber, BallComplex, BallReal
from .words import Word

SCHEMA_PREFIX = "sturmlab"
SCHEMA_REV = 1

EXPORT_KINDS = ("stutter", "s3trend", "staircase", "attractor")


# -- exact number formatting -------------------------------------------------


def decimal_string(fr) -> str:
    """Exact decimal form of a rational when it terminates, else 'p/q'."""
    fr = Fraction(fr)
    den = fr.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{fr.numerator}/{fr.denominator}"
    digits = max(twos, fives)
    scaled = abs(fr.numerator) * 10 ** digits // fr.denominator
    sign = "-" if fr.numerator < 0 else ""
    text = str(scaled).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def parse_number(text: str) -> Fraction:
    """Inverse of decimal_string (accepts decimals, p/q, and integers)."""
    return Fraction(text)


def _encode_ball(b: BallReal) -> dict:
    mid, rad = b.mid, b.rad
    return {"mid": decimal_string(mid), "rad": decimal_string(rad),
            "bits": b.prec}


def ball_from_json(obj) -> BallReal:
    """Rebuild an enclosure from its {mid, rad, bits} encoding."""
    if not isinstance(obj, dict) or not {"mid", "rad", "bits"} <= set(obj):
        raise ValidationError("not a serialized ball")
    mid = parse_number(obj["mid"])
    rad = parse_number(obj["rad"])
    return BallReal(mid - rad, mid + rad, int(obj["bits"]))


def encode_value(v):
    """JSON-able form of any sturmlab value; exactness survives as text."""
    if v is None or isinstance(v, (bool, str, float)):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, BallReal):
        return _encode_ball(v)
    if isinstance(v, BallComplex):
        return {"re": _encode_ball(v.re), "im": _encode_ball(v.im)}
    if isinstance(v, AlgebraicNumber):
        return algebraic_literal(v)
    if isinstance(v, Word):
        out = {"alphabet": [encode_value(a) for a in v.alphabet]}
        if v.is_binary:
            out["symbols"] = v.to_line()
        else:
            out["symbols"] = list(v.symbols)
        if v.origin_note:
            out["note"] = v.origin_note
        return out
    if isinstance(v, bytes):
        return v.decode("ascii").translate(str.maketrans("\x00\x01", "01"))
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        return {f.name: encode_value(getattr(v, f.name))
                for f in dataclasses.fields(v)}
    if isinstance(v, dict):
        return {str(k): encode_value(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(u) for u in v]
    raise ValidationError(f"unserializable value of type {type(v).__name__}")


# -- value literals ----------------------------------------------------------


def algebraic_literal(v: AlgebraicNumber) -> str:
    coeffs = ",".join(str(c) for c in v.coeffs)
    if v.is_real:
        box = ";".join(f"{b.numerator}/{b.denominator}" for b in v.box[:2])
    else:
        box = ";".join(f"{b.numerator}/{b.denominator}" for b in v.box)
    return f"alg:{coeffs}@{box}"


def value_literal(v) -> str:
    """Canonical literal for the inputs echo (round-trips via parse_value)."""
    if isinstance(v, bool):
        raise ValidationError("booleans are not value literals")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, AlgebraicNumber):
        return algebraic_literal(v)
    raise ValidationError(f"no literal form for type {type(v).__name__}")


def parse_value(text):
    """Parse a value literal: integer, rational/decimal, quad:, or alg:.

    quad:a,b,d,c is (a + b*sqrt(d))/c (d < 0 gives the complex quadratic);
    alg:c0,...,cn@lo;hi is an exact root given by integer minimal-polynomial
    coefficients (constant first) and an isolating interval, with a
    four-part box lo;hi;imlo;imhi isolating a complex root.
    """
    from .errors import ParseError

    if not isinstance(text, str):
        if isinstance(text, bool) or not isinstance(text, int):
            raise ParseError(f"value literal must be text, got "
                             f"{type(text).__name__}")
        return text
    text = text.strip()
    try:
        if text.startswith("quad:"):
            parts = [int(p) for p in text[5:].split(",")]
            if len(parts) != 4:
                raise ValueError("quad: needs a,b,d,c")
            return AlgebraicNumber.from_quadratic(*parts)
        if text.startswith("alg:"):
            body = text[4:]
            coeff_text, _, box_text = body.partition("@")
            coeffs = [int(c) for c in coeff_text.split(",")]
            bounds = [Fraction(b) for b in box_text.split(";")]
            if len(bounds) == 2:
                box = (bounds[0], bounds[1], Fraction(0), Fraction(0))
                return AlgebraicNumber(coeffs, box, True)
            if len(bounds) == 4:
                return AlgebraicNumber(coeffs, tuple(bounds), False)
            raise ValueError("alg: box needs 2 or 4 bounds")
        if "/" in text or "." in text:
            return Fraction(text)
        return int(text)
    except (ValueError, ZeroDivisionError, ArithmeticError) as err:
        raise ParseError(f"malformed value literal {text!r}: {err}") from err


# -- report envelope ---------------------------------------------------------


def make_report(kind: str, inputs: dict, results: dict) -> dict:
    return {
        "schema_version": f"{SCHEMA_PREFIX}/{kind}/{SCHEMA_REV}",
        "kind": kind,
        "inputs": {str(k): encode_value(v) for k, v in inputs.items()},
        "results": encode_value(results),
    }


def dump_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


# -- CSV plot exports --------------------------------------------------------


def _field(row: dict, name: str):
    v = row.get(name)
    return "" if v is None else v


def _ball_columns(obj):
    mid = parse_number(obj["mid"])
    rad = parse_number(obj["rad"])
    return (decimal_string(mid), decimal_string(mid - rad),
            decimal_string(mid + rad), decimal_string(rad))


def _require(report: dict, *path):
    node = report
    for key in path:
        if not isinstance(node, dict) or key not in node:
            raise ValidationError(
                f"report lacks the field {'.'.join(path)} needed here")
        node = node[key]
    return node


def export_plot_data(report: dict, kind: str):
    """(header, rows) of the delimited table for a known plot kind."""
    if kind not in EXPORT_KINDS:
        raise UnknownKind(f"no export kind {kind!r}; known: "
                          + ", ".join(EXPORT_KINDS))
    if kind == "stutter":
        records = _require(report, "results", "records")
        header = ["n", "r", "s", "spread", "log_r"]
        rows = [[_field(r, "n"), _field(r, "r"), _field(r, "s"),
                 _field(r, "spread"), repr(float(r["log_r"]))]
                for r in records]
        return header, rows
    if kind == "s3trend":
        records = _require(report, "results", "records")
        header = ["n", "r", "log_r", "spread", "gap_min",
                  "first_margin", "last_margin"]
        rows = [[_field(r, "n"), _field(r, "r"), repr(float(r["log_r"])),
                 _field(r, "spread"), _field(r, "gap_min"),
                 _field(r, "first_margin"), _field(r, "last_margin")]
                for r in records]
        return header, rows
    if kind == "staircase":
        sweep = _require(report, "results", "staircase")
        header = ["delta", "rho_mid", "rho_lo", "rho_hi"]
        rows = []
        for entry in sweep:
            mid, lo, hi, _ = _ball_columns(entry["rho"])
            rows.append([decimal_string(parse_number(entry["delta"])),
                         mid, lo, hi])
        return header, rows
    points = _require(report, "results", "points")
    header = ["index", "point", "rad"]
    rows = []
    for i, entry in enumerate(points):
        mid, _, _, rad = _ball_columns(entry)
        rows.append([str(i), mid, rad])
    return header, rows


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- figures -----------------------------------------------------------------


def render_figure(kind: str, header, rows, path: str) -> None:
    """Draw the exported table to a PNG next to the delimited output."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if kind == "staircase":
        xs = [float(Fraction(r[0])) for r in rows]
        ys = [float(Fraction(r[1])) for r in rows]
        ax.step(xs, ys, where="post")
        ax.set_xlabel("offset delta")
        ax.set_ylabel("rotation number")
    elif kind == "attractor":
        xs = [int(r[0]) for r in rows]
        ys = [float(Fraction(r[1])) for r in rows]
        ax.plot(xs, ys, ".", markersize=3)
        ax.set_xlabel("sample index")
        ax.set_ylabel("orbit point")
    elif kind in ("stutter", "s3trend"):
        xs = [int(r[0]) for r in rows]
        ys = [float(r[2 if kind == "s3trend" else 4]) for r in rows]
        ax.plot(xs, ys, "o-")
        ax.set_xlabel("record n")
        ax.set_ylabel("log r_n")
    else:  # pragma: no cover - kinds are validated upstream
        raise UnknownKind(kind)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": "sturmlab"})
    plt.close(fig)
