"""Command-line entry point: subcommand dispatch, manifest runs, JSON/CSV
emission, and exit-code mapping.

Exit codes: 0 success, 2 parse, 3 validation, 4 indeterminate (no certified
answer at the allowed precision), 5 domain, 6 unknown export kind,
7 internal.  Machine-readable error JSON goes to stderr.  The environment
variable STURMLAB_PREC_CEILING caps every working precision; there is no
other environment configuration.
"""

import argparse
import json
import sys
from fractions import Fraction

from .confrac import cf_expand, positive_side_denominators
from .errors import ParseError, SturmlabError, ValidationError
from .evalnum import (
    Base,
    DigitSequence,
    Relation,
    check_key_inequality,
    integer_relation,
    sturmian_number,
)
from .heights import gap_split_check, parse_poly, weil_height_alg
from .kernel import BallReal
from .kernel.ops import prec_ceiling
from .reports import (
    ball_from_json,
    csv_text,
    decimal_string,
    dump_json,
    export_plot_data,
    make_report,
    parse_value,
    render_figure,
    value_literal,
)
from .rotor import (
    ContractedRotation,
    Decomposition,
    attractor_sample,
    decompose_limit_point,
    delta_for_rotation,
    rotation_number,
)
from .stutter import stutter_report
from .words import CodingSpec, theta_coding

DEFAULT_PREC = 256


def _clamp_prec(prec: int) -> int:
    if prec < 16:
        raise ValidationError("precision must be at least 16 bits")
    return min(prec, prec_ceiling())


def _get(inputs: dict, name: str, default=None, required=False):
    if name in inputs and inputs[name] is not None:
        return inputs[name]
    if required:
        raise ValidationError(f"missing required input {name!r}")
    return default


def _as_int(inputs: dict, name: str, default=None, required=False) -> int:
    v = _get(inputs, name, default, required)
    if v is None:
        return v
    try:
        return int(v)
    except (TypeError, ValueError) as err:
        raise ParseError(f"input {name!r} must be an integer") from err


def _as_value(inputs: dict, name: str, default=None, required=False):
    v = _get(inputs, name, default, required)
    if v is None or not isinstance(v, str):
        return v
    return parse_value(v)


def _as_fraction(inputs: dict, name: str, default=None, required=False):
    v = _as_value(inputs, name, default, required)
    if v is None:
        return v
    if isinstance(v, int):
        return Fraction(v)
    if not isinstance(v, Fraction):
        raise ValidationError(f"input {name!r} must be rational")
    return v


# -- handlers ----------------------------------------------------------------


def _handle_cf(inputs: dict, prec: int) -> dict:
    theta = _as_value(inputs, "theta", required=True)
    terms = _as_int(inputs, "terms", 20)
    denoms = _as_int(inputs, "denominators", 0)
    cf = cf_expand(theta, terms)
    results = {
        "quotients": list(cf.quotients),
        "convergents": [list(pq) for pq in cf.convergents],
        "terminated": cf.terminated,
        "truncated": cf.truncated,
    }
    if denoms:
        results["positive_side"] = positive_side_denominators(theta, denoms)
    echo = {"theta": theta, "terms": terms, "denominators": denoms}
    return make_report("cf", echo, results)


def _coding_spec(inputs: dict) -> CodingSpec:
    theta = _as_value(inputs, "theta", required=True)
    x = _as_value(inputs, "x", theta)
    origin = _as_int(inputs, "origin", 1)
    return CodingSpec(theta, x, origin)


def _handle_code(inputs: dict, prec: int) -> dict:
    spec = _coding_spec(inputs)
    length = _as_int(inputs, "length", required=True)
    start = _as_int(inputs, "start", 0)
    word = theta_coding(spec, length, start)
    echo = {"theta": spec.theta, "x": spec.x, "origin": spec.index_origin,
            "length": length, "start": start}
    return make_report("coding", echo, {"word": word})


def _handle_stutter(inputs: dict, prec: int) -> dict:
    spec = _coding_spec(inputs)
    w = _as_fraction(inputs, "w", Fraction(1))
    n_max = _as_int(inputs, "n_max", 4)
    prefix = _as_int(inputs, "prefix", 100_000)
    witness = stutter_report([spec], w, n_max, prefix)
    echo = {"theta": spec.theta, "x": spec.x, "origin": spec.index_origin,
            "w": w, "n_max": n_max, "prefix": prefix}
    return make_report("stutter", echo, {
        "w": witness.w, "d": witness.d, "records": list(witness.records),
        "diagnostics": witness.diagnostics, "note": witness.note})


def _digit_sequence(spec: CodingSpec) -> DigitSequence:
    return DigitSequence(lambda n: theta_coding(spec, n), (0, 1))


def _handle_eval(inputs: dict, prec: int) -> dict:
    spec = _coding_spec(inputs)
    beta = _as_value(inputs, "beta", required=True)
    value = sturmian_number(_digit_sequence(spec), Base(beta), prec)
    echo = {"theta": spec.theta, "x": spec.x, "origin": spec.index_origin,
            "beta": beta, "prec": prec}
    return make_report("eval", echo, {"value": value})


def _load_report(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        with open(source, "r", encoding="ascii") as fh:
            return json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read report {source!r}: {err}") from err
    except json.JSONDecodeError as err:
        raise ParseError(f"report {source!r} is not valid JSON: {err}") from err


def _handle_keyineq(inputs: dict, prec: int) -> dict:
    upstream = _load_report(_get(inputs, "stutter_report", required=True))
    if upstream.get("kind") != "stutter":
        raise ValidationError("keyineq consumes a stutter report")
    up_in = upstream["inputs"]
    spec = _coding_spec(up_in)
    beta = _as_value(inputs, "beta", required=True)
    base = Base(beta)
    seq = _digit_sequence(spec)
    wanted = _get(inputs, "records")
    records = upstream["results"]["records"]
    if wanted is None:
        wanted = [r["n"] for r in records if r.get("leaders")]
    checks = []
    by_n = {int(r["n"]): r for r in records}
    for n in wanted:
        rec = by_n.get(int(n))
        if rec is None:
            raise ValidationError(f"no stutter record n={n} in the report")
        if not rec.get("leaders"):
            raise ValidationError(f"record n={n} has no pair leaders")
        rep = check_key_inequality(seq, base, int(rec["r"]), int(rec["s"]),
                                   [int(i) for i in rec["leaders"]], prec)
        checks.append(rep)
    echo = {"theta": spec.theta, "x": spec.x, "origin": spec.index_origin,
            "beta": beta, "records": [int(n) for n in wanted], "prec": prec}
    return make_report("keyineq", echo, {"checks": checks})


def _handle_relation(inputs: dict, prec: int) -> dict:
    literals = _get(inputs, "values", [])
    values = [parse_value(t) for t in literals]
    for source in _get(inputs, "from_eval", []):
        upstream = _load_report(source)
        if upstream.get("kind") != "eval":
            raise ValidationError("from_eval consumes eval reports")
        enc = upstream["results"]["value"]
        re = ball_from_json(enc["re"])
        im = ball_from_json(enc["im"])
        if im.lo == im.hi == 0:
            values.append(re)
        else:
            from .kernel import BallComplex
            values.append(BallComplex(re, im))
    bound = _as_int(inputs, "height_bound", 100)
    enclosed = [v if isinstance(v, (int, Fraction)) else v for v in values]
    outcome = integer_relation(enclosed, bound, prec)
    results = {"found": isinstance(outcome, Relation), "outcome": outcome}
    echo = {"values": [t for t in literals], "from_eval": len(values)
            - len(literals), "height_bound": bound, "prec": prec}
    return make_report("relation", echo, results)


def _handle_heights(inputs: dict, prec: int) -> dict:
    poly_text = _get(inputs, "poly")
    if poly_text is not None:
        f = parse_poly(poly_text)
        d0 = _as_int(inputs, "d0", required=True)
        d1 = _as_int(inputs, "d1", required=True)
        beta = _as_value(inputs, "beta", required=True)
        report = gap_split_check(f, d0, d1, beta, prec)
        echo = {"poly": poly_text, "d0": d0, "d1": d1, "beta": beta,
                "prec": prec}
        return make_report("gap", echo, {"report": report})
    value = _as_value(inputs, "value", required=True)
    height = weil_height_alg(value, prec)
    return make_report("height", {"value": value, "prec": prec},
                       {"height": height})


def _offset_of(inputs: dict, lam, tol_default=Fraction(1, 10**8)):
    """The offset literal, or the midpoint of an inverted band."""
    delta = _as_value(inputs, "delta")
    if delta is not None:
        return delta, None
    theta = _as_value(inputs, "theta")
    if theta is None:
        raise ValidationError("need either delta or theta (to invert)")
    tol = _as_fraction(inputs, "tol", tol_default)
    band = delta_for_rotation(lam, theta, tol)
    return band.mid, band


def _handle_rotor_rotnum(inputs: dict, prec: int) -> dict:
    lam = _as_value(inputs, "lam", required=True)
    iters = _as_int(inputs, "iters", 4000)
    grid = _as_int(inputs, "grid", 0)
    if grid:
        lam_f = Fraction(lam) if isinstance(lam, int) else lam
        if not isinstance(lam_f, Fraction):
            raise ValidationError("grid sweeps need a rational slope")
        sweep = []
        for j in range(grid):
            delta = (1 - lam_f) + lam_f * Fraction(j + 1, grid + 1)
            rho = rotation_number(ContractedRotation(lam_f, delta), iters)
            sweep.append({"delta": delta, "rho": rho})
        echo = {"lam": lam, "iters": iters, "grid": grid}
        return make_report("staircase", echo, {"staircase": sweep})
    delta = _as_value(inputs, "delta", required=True)
    rho = rotation_number(ContractedRotation(lam, delta), iters)
    echo = {"lam": lam, "delta": delta, "iters": iters}
    return make_report("rotnum", echo, {"rho": rho})


def _handle_rotor_invert(inputs: dict, prec: int) -> dict:
    lam = _as_value(inputs, "lam", required=True)
    theta = _as_value(inputs, "theta", required=True)
    tol = _as_fraction(inputs, "tol", Fraction(1, 10**8))
    band = delta_for_rotation(lam, theta, tol)
    echo = {"lam": lam, "theta": theta, "tol": tol}
    return make_report("invert", echo, {
        "delta_band": band, "width": decimal_string(band.hi - band.lo)})


def _handle_rotor_attractor(inputs: dict, prec: int) -> dict:
    lam = _as_value(inputs, "lam", required=True)
    delta, band = _offset_of(inputs, lam)
    burn_in = _as_int(inputs, "burn_in", 80)
    n_points = _as_int(inputs, "points", 200)
    sample = attractor_sample(ContractedRotation(lam, delta),
                              burn_in, n_points)
    echo = {"lam": lam, "delta": delta, "burn_in": burn_in,
            "points": n_points}
    results = {"points": list(sample.points),
               "itinerary": sample.itinerary,
               "burn_in": sample.burn_in,
               "depth_bound": sample.depth_bound}
    if band is not None:
        results["inverted_band"] = band
    return make_report("attractor", echo, results)


def _handle_rotor_decompose(inputs: dict, prec: int) -> dict:
    lam = _as_value(inputs, "lam", required=True)
    theta = _as_value(inputs, "theta", required=True)
    delta, _ = _offset_of(inputs, lam)
    cr = ContractedRotation(lam, delta)
    y = _as_value(inputs, "y")
    index = _as_int(inputs, "index")
    if (y is None) == (index is None):
        raise ValidationError("give exactly one of y or index")
    if y is None:
        burn_in = _as_int(inputs, "burn_in", 80)
        sample = attractor_sample(cr, burn_in, index + 1)
        y = sample.points[index]
    n_symbols = _as_int(inputs, "symbols", 64)
    outcome = decompose_limit_point(cr, y, n_symbols, prec, theta=theta)
    echo = {"lam": lam, "delta": delta, "theta": theta,
            "symbols": n_symbols, "prec": prec}
    if isinstance(y, BallReal):
        echo["y"] = decimal_string(y.mid)
    else:
        echo["y"] = value_literal(y)
    if isinstance(outcome, Decomposition):
        results = {"form": "first", "z": outcome.z,
                   "residual": outcome.residual,
                   "x_enclosure": outcome.x_enclosure,
                   "x_witness": value_literal(outcome.x_witness),
                   "symbols_used": outcome.symbols_used}
    else:
        results = {"form": "second", "m": outcome.m,
                   "gamma_note": outcome.gamma_note}
    return make_report("decompose", echo, results)


def _handle_export(inputs: dict, prec: int) -> dict:
    report = _load_report(_get(inputs, "report", required=True))
    kind = _get(inputs, "export_kind", required=True)
    out = _get(inputs, "out", required=True)
    header, rows = export_plot_data(report, kind)
    text = csv_text(header, rows)
    with open(out, "w", encoding="ascii") as fh:
        fh.write(text)
    figure = None
    if _get(inputs, "figure", True):
        figure = _get(inputs, "figure_path") or (str(out).rsplit(".", 1)[0]
                                                 + ".png")
        render_figure(kind, header, rows, figure)
    echo = {"export_kind": kind, "out": str(out)}
    return make_report("export", echo, {
        "rows": len(rows), "csv": str(out), "figure": figure})


_HANDLERS = {
    "cf": _handle_cf,
    "code": _handle_code,
    "stutter": _handle_stutter,
    "eval": _handle_eval,
    "keyineq": _handle_keyineq,
    "relation": _handle_relation,
    "heights": _handle_heights,
    "rotor rotnum": _handle_rotor_rotnum,
    "rotor invert": _handle_rotor_invert,
    "rotor attractor": _handle_rotor_attractor,
    "rotor decompose": _handle_rotor_decompose,
    "export": _handle_export,
}


def dispatch(command: str, inputs: dict, prec: int) -> dict:
    handler = _HANDLERS.get(command)
    if handler is None:
        raise ValidationError(f"unknown command {command!r}; known: "
                              + ", ".join(sorted(_HANDLERS)))
    return handler(inputs, _clamp_prec(prec))


# -- manifests ----------------------------------------------------------------


def run_manifest(path: str) -> dict:
    """Execute one manifest; returns the report after writing outputs."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            manifest = json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read manifest {path!r}: {err}") from err
    except json.JSONDecodeError as err:
        raise ParseError(f"manifest {path!r} is not valid JSON: {err}") from err
    if not isinstance(manifest, dict) or not manifest:
        raise ValidationError("empty manifest")
    command = manifest.get("command")
    if not isinstance(command, str) or not command:
        raise ValidationError("manifest needs a command string")
    inputs = manifest.get("inputs", {})
    if not isinstance(inputs, dict):
        raise ValidationError("manifest inputs must be a mapping")
    prec = manifest.get("precision", DEFAULT_PREC)
    if not isinstance(prec, int):
        raise ValidationError("manifest precision must be an integer")
    outputs = manifest.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ValidationError("manifest outputs must be a mapping")

    report = dispatch(command, inputs, prec)
    if "report" in outputs:
        with open(outputs["report"], "w", encoding="ascii") as fh:
            fh.write(dump_json(report))
    if "csv" in outputs:
        kind = inputs.get("export_kind", report["kind"])
        header, rows = export_plot_data(report, kind)
        with open(outputs["csv"], "w", encoding="ascii") as fh:
            fh.write(csv_text(header, rows))
        if "figure" in outputs:
            render_figure(kind, header, rows, outputs["figure"])
    return report


# -- argument parsing ---------------------------------------------------------


def _add_common_coding(p):
    p.add_argument("--theta", required=True, help="slope literal")
    p.add_argument("--x", help="starting point literal (default: theta)")
    p.add_argument("--origin", type=int, default=1, choices=(0, 1))


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="sturmlab",
        description="Certified Sturmian codings, evaluations, heights, and "
                    "contracted-rotation dynamics.",
        epilog="Value literals: integers (7), rationals (3/4), exact "
               "decimals (0.125), quad:a,b,d,c for (a+b*sqrt(d))/c, and "
               "alg:coeffs@lo;hi for a minimal-polynomial root. Exit codes: "
               "0 ok, 2 parse, 3 validation, 4 indeterminate, 5 domain, "
               "6 unknown export kind, 7 internal.")
    top.add_argument("--prec", type=int, default=DEFAULT_PREC,
                     help="working precision in bits (default 256; capped "
                          "by STURMLAB_PREC_CEILING)")
    top.add_argument("--json", action="store_true",
                     help="print the full canonical JSON report")
    top.add_argument("--manifest", help="run this manifest file and exit")
    sub = top.add_subparsers(dest="command")

    p = sub.add_parser("cf", help="continued-fraction expansion")
    p.add_argument("--theta", required=True)
    p.add_argument("--terms", type=int, default=20)
    p.add_argument("--denominators", type=int, default=0,
                   help="also list this many positive-side denominators")

    p = sub.add_parser("code", help="rotation coding of a point")
    _add_common_coding(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--start", type=int, default=0)

    p = sub.add_parser("stutter", help="stuttering witness records")
    _add_common_coding(p)
    p.add_argument("--w", default="1", help="repetition factor (rational)")
    p.add_argument("--n-max", dest="n_max", type=int, default=4)
    p.add_argument("--prefix", type=int, default=100_000)

    p = sub.add_parser("eval", help="Sturmian number of a coding")
    _add_common_coding(p)
    p.add_argument("--beta", required=True, help="base literal, |beta| > 1")

    p = sub.add_parser("keyineq", help="key inequality on stutter records")
    p.add_argument("--stutter-report", dest="stutter_report", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--records", help="comma-separated record indices n")

    p = sub.add_parser("relation", help="integer-relation probe")
    p.add_argument("--values", help="comma-separated value literals")
    p.add_argument("--from-eval", dest="from_eval",
                   help="comma-separated eval report paths")
    p.add_argument("--height-bound", dest="height_bound", type=int,
                   default=100)

    p = sub.add_parser("heights", help="Weil height / gap splitting test")
    p.add_argument("--value", help="algebraic value literal (height mode)")
    p.add_argument("--poly", help="sparse polynomial text (gap mode)")
    p.add_argument("--d0", type=int)
    p.add_argument("--d1", type=int)
    p.add_argument("--beta")

    rotor = sub.add_parser("rotor", help="contracted-rotation dynamics")
    rsub = rotor.add_subparsers(dest="rotor_command", required=True)

    p = rsub.add_parser("rotnum", help="certified rotation number")
    p.add_argument("--lam", required=True)
    p.add_argument("--delta")
    p.add_argument("--iters", type=int, default=4000)
    p.add_argument("--grid", type=int, default=0,
                   help="sweep this many offsets across (1-lam, 1) instead")

    p = rsub.add_parser("invert", help="offset band for a target rotation")
    p.add_argument("--lam", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--tol", default="1/100000000")

    p = rsub.add_parser("attractor", help="certified limit-set sample")
    p.add_argument("--lam", required=True)
    p.add_argument("--delta")
    p.add_argument("--theta", help="invert this target instead of --delta")
    p.add_argument("--tol", default="1/100000000")
    p.add_argument("--burn-in", dest="burn_in", type=int, default=80)
    p.add_argument("--points", type=int, default=200)

    p = rsub.add_parser("decompose", help="limit-point decomposition")
    p.add_argument("--lam", required=True)
    p.add_argument("--delta")
    p.add_argument("--theta", required=True)
    p.add_argument("--tol", default="1/100000000")
    p.add_argument("--y", help="point literal to decompose")
    p.add_argument("--index", type=int,
                   help="decompose this sampled attractor point instead")
    p.add_argument("--burn-in", dest="burn_in", type=int, default=80)
    p.add_argument("--symbols", type=int, default=64)

    p = sub.add_parser("export", help="CSV (and figure) from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--kind", dest="export_kind", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", dest="figure", action="store_false")
    p.add_argument("--figure-path", dest="figure_path")

    return top


_ARG_KEYS = {
    "cf": ("theta", "terms", "denominators"),
    "code": ("theta", "x", "origin", "length", "start"),
    "stutter": ("theta", "x", "origin", "w", "n_max", "prefix"),
    "eval": ("theta", "x", "origin", "beta"),
    "keyineq": ("stutter_report", "beta", "records"),
    "relation": ("values", "from_eval", "height_bound"),
    "heights": ("value", "poly", "d0", "d1", "beta"),
    "rotor rotnum": ("lam", "delta", "iters", "grid"),
    "rotor invert": ("lam", "theta", "tol"),
    "rotor attractor": ("lam", "delta", "theta", "tol", "burn_in", "points"),
    "rotor decompose": ("lam", "delta", "theta", "tol", "y", "index",
                        "burn_in", "symbols"),
    "export": ("report", "export_kind", "out", "figure", "figure_path"),
}

_SPLIT_KEYS = {"records", "values", "from_eval"}


def _inputs_from_args(command: str, args) -> dict:
    inputs = {}
    for key in _ARG_KEYS[command]:
        v = getattr(args, key, None)
        if v is None:
            continue
        if key in _SPLIT_KEYS and isinstance(v, str):
            v = [part.strip() for part in v.split(",") if part.strip()]
        inputs[key] = v
    return inputs


def _summary(report: dict) -> str:
    kind = report["kind"]
    results = report["results"]
    if kind == "rotnum":
        b = results["rho"]
        return f"rotation number ~ {b['mid'][:24]} (rad {b['rad'][:12]})"
    if kind == "invert":
        b = results["delta_band"]
        return (f"offset band mid {b['mid'][:24]}..., width "
                f"{results['width'][:12]}")
    if kind == "decompose":
        if results["form"] == "second":
            return f"second form: m = {results['m']}"
        return (f"z = {results['z']}, residual rad "
                f"{results['residual']['rad'][:12]}")
    if kind == "attractor":
        return (f"{len(results['points'])} certified points after burn-in "
                f"{results['burn_in']}")
    if kind == "stutter":
        ok = sum(1 for r in results["records"]
                 if r["s1_holds"] and r["s2_pairs_ok"] and r["s4_holds"])
        return f"{len(results['records'])} records, {ok} fully verified"
    if kind == "export":
        return f"wrote {results['rows']} rows to {results['csv']}"
    return f"{kind} report ready"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.manifest:
            report = run_manifest(args.manifest)
        else:
            command = args.command
            if command is None:
                parser.print_usage(sys.stderr)
                return 3
            if command == "rotor":
                command = f"rotor {args.rotor_command}"
            report = dispatch(command, _inputs_from_args(command, args),
                              args.prec)
        if args.json:
            sys.stdout.write(dump_json(report))
        else:
            print(_summary(report))
        return 0
    except SturmlabError as err:
        payload = {"error": type(err).__name__, "message": str(err),
                   "exit_code": err.exit_code}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return err.exit_code
    except Exception as err:  # noqa: BLE001 - the contract maps these to 7
        payload = {"error": type(err).__name__, "message": str(err),
                   "exit_code": 7}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 7


if __name__ == "__main__":
    sys.exit(main())
