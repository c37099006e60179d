"""Command-line entry point: ``bellcheck <subcommand> ...``.

Every subcommand writes one JSON document to stdout (or ``--output``).
Exit codes: 0 affirmative, 1 negative with a certificate or witness,
2 input error, 3 numerically ambiguous.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .battery import ITEMS, BatteryConfig, run_theorem_battery
from .epr import check_completeness_implication
from .errors import BellCheckError, NumericallyAmbiguous, ScenarioTooLarge
from .lhv import ROUNDING_NOISE, BellCertificate, LhvModel, solve_lhv, verify_certificate, verify_model
from .numerics import DEFAULT_FLOAT_TOL, FLOAT, RATIONAL
from .quantum import (
    MeasurementSetting,
    born_phenomenon,
    boxes_oqm_theory,
    boxes_phenomenon,
    maximally_mixed,
    oqm_theory,
    singlet,
    werner,
    SINGLET_VECTOR,
)
from .scenario import (
    ChshSettings,
    Phenomenon,
    chsh_value,
    is_predictable,
    is_signal_local,
    rationalize,
    validate_phenomenon,
)
from .theory import STRONG, WEAK, Theory, classify, reproduces

OK, NEGATIVE, INPUT_ERROR, AMBIGUOUS = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code, doc):
        self.code, self.doc = code, doc


def _tolerance(args, exact: bool):
    if exact:
        return Fraction(0)
    return DEFAULT_FLOAT_TOL if args.tol is None else args.tol


def _input_error(message, pointer=""):
    return _Exit(INPUT_ERROR, {"format": "bellcheck.error", "version": io.VERSION,
                               "kind": "input", "message": message, "pointer": pointer})


def _load(path, kind):
    obj = io.load(path)
    if not isinstance(obj, kind):
        raise _input_error(f"{path}: expected a {kind.__name__}, got {type(obj).__name__}",
                           "/format")
    return obj


def _phenomenon(args, path=None) -> Phenomenon:
    """Load, apply the encoding flag, and reject tables that are not probabilities."""
    p = _load(path or args.input, Phenomenon)
    if args.encoding == RATIONAL and not p.exact:
        if validate_phenomenon(p) or not is_signal_local(p, DEFAULT_FLOAT_TOL).holds:
            raise _input_error("only valid signal-local float tables can be rationalized", "/table")
        p = rationalize(p)
    elif args.encoding == FLOAT and p.exact:
        p = p.to_float()
    tol = _tolerance(args, p.exact)
    p = Phenomenon(p.scenario, p.table, tol)
    bad = validate_phenomenon(p)
    if bad:
        v = bad[0]
        ptr = f"/table/{v.a}/{v.b}" + ("" if v.A is None else f"/{v.A}/{v.B}")
        raise _input_error(f"not a probability table ({v.kind}, off by {float(v.magnitude):.3g})", ptr)
    return p


def _theory(args, path=None) -> Theory:
    t = _load(path or args.input, Theory)
    if args.encoding == FLOAT and t.exact:
        t = t.to_float()
    elif args.encoding == RATIONAL and not t.exact:
        raise _input_error("a float theory cannot be converted to rationals exactly", "/encoding")
    return t


# subcommands ----------------------------------------------------------------

def cmd_check_phenomenon(args):
    p = _load(args.input, Phenomenon)
    if args.encoding == FLOAT and p.exact:
        p = p.to_float()
    tol = _tolerance(args, p.exact)
    p = Phenomenon(p.scenario, p.table, tol)
    violations = validate_phenomenon(p)
    doc = {"format": "bellcheck.phenomenon_check", "version": io.VERSION,
           "encoding": p.encoding, "tolerance": tol,
           "violations": [io.jsonable(v) for v in violations]}
    if violations:
        return NEGATIVE, doc
    sl = is_signal_local(p, tol)
    s = p.scenario
    doc["signal_local"] = io.jsonable(sl)
    doc["predictable"] = [
        {"a": a, "b": b, "direction": d}
        for a in range(s.settings_a) for b in range(s.settings_b) for d in ("bob", "alice")
        if is_predictable(p, a, b, tol, d)]
    if s.is_plus_minus and s.settings_a >= 2 and s.settings_b >= 2:
        doc["chsh"] = chsh_value(p)
    return (OK if sl.holds else NEGATIVE), doc


def cmd_check_theory(args):
    t = _theory(args)
    tol = _tolerance(args, t.exact)
    v = classify(t, tol, args.fl_mode)
    doc = io.property_vector_to_dict(v)
    code = OK
    if args.phenomenon:
        p = _phenomenon(args, args.phenomenon)
        rep = reproduces(t, p, tol)
        doc["reproduces"] = io.jsonable(rep)
        code = OK if rep.holds else NEGATIVE
    required = [x for x in (args.require or "").split(",") if x]
    unknown = set(required) - set(v.as_dict())
    if unknown:
        raise _input_error(f"unknown properties {sorted(unknown)}")
    if any(not v.as_dict()[name].holds for name in required):
        code = NEGATIVE
    return code, doc


def cmd_solve_lhv(args):
    p = _phenomenon(args)
    res = solve_lhv(p, p.tolerance, named=not args.no_named)
    return (OK if isinstance(res, LhvModel) else NEGATIVE), io.to_dict(res)


def cmd_verify(args):
    obj = io.load(args.input)
    p = _phenomenon(args, args.phenomenon)
    if isinstance(obj, LhvModel):
        check = verify_model(obj, p, p.tolerance)
    elif isinstance(obj, BellCertificate):
        check = verify_certificate(obj, p)
    else:
        raise _input_error("expected an lhv_model or bell_certificate document", "/format")
    doc = {"format": "bellcheck.verification", "version": io.VERSION,
           "object": io.to_dict(obj)["format"], **io.jsonable(check)}
    return (OK if check.holds else NEGATIVE), doc


def _angles(values, plane):
    return [MeasurementSetting.from_angle(x, plane) for x in values]


def cmd_quantum_gen(args):
    if args.state == "boxes":
        obj = boxes_oqm_theory() if args.theory else boxes_phenomenon()
        if args.encoding == FLOAT:
            obj = obj.to_float()
        return OK, io.to_dict(obj)
    a, b = _angles(args.alice, args.plane), _angles(args.bob, args.plane)
    if args.state == "singlet":
        state = singlet()
    else:
        if args.v is None or not 0 <= args.v <= 1:
            raise _input_error("werner needs --v in [0, 1]")
        state = werner(args.v)
    if args.theory:
        if args.state == "singlet":
            decomposition = [(1.0, SINGLET_VECTOR)]
        else:
            decomposition = [(args.v, singlet()), (1 - args.v, maximally_mixed())]
        return OK, io.to_dict(oqm_theory(state, decomposition, a, b))
    p = born_phenomenon(state, a, b)
    if args.encoding == RATIONAL:
        p = rationalize(p)
    return OK, io.to_dict(p)


def cmd_chsh(args):
    p = _phenomenon(args)
    cs = ChshSettings(*args.settings) if args.settings else ChshSettings()
    try:
        value = chsh_value(p, cs)
    except BellCheckError as exc:
        raise _input_error(str(exc), "/outcome_values") from None
    tol = p.tolerance
    doc = {"format": "bellcheck.chsh", "version": io.VERSION, "settings": io.jsonable(cs),
           "value": value, "local_bound": 2, "violated": bool(abs(value) - 2 > tol)}
    if not p.exact and min(tol, ROUNDING_NOISE) < abs(value) - 2 <= tol:
        raise NumericallyAmbiguous(f"|CHSH| exceeds the local bound by only {abs(value) - 2:.3g}",
                                   gap=abs(value) - 2)
    return (NEGATIVE if doc["violated"] else OK), io.jsonable(doc)


def cmd_epr_report(args):
    t = _theory(args)
    p = _phenomenon(args, args.phenomenon)
    tol = _tolerance(args, t.exact and p.exact)
    report = check_completeness_implication(t, p, tol)
    doc = {"format": "bellcheck.epr_report", "version": io.VERSION,
           "predictable": [{"a": a, "b": b, "holds": v} for (a, b), v in report.predictable.items()],
           "represented": [{"b": b, "holds": v} for b, v in report.represented.items()],
           "chain": io.jsonable(report.chain), "vacuous": report.vacuous, "passed": report.passed}
    return (OK if report.passed else NEGATIVE), io.jsonable(doc)


def cmd_battery(args):
    cfg = BatteryConfig(seed=args.seed, encoding=args.encoding or FLOAT, tol=args.tol)
    only = args.only.split(",") if args.only else None
    if only and set(only) - {n for n, _ in ITEMS}:
        raise _input_error(f"unknown battery items {sorted(set(only) - {n for n, _ in ITEMS})}")
    report = run_theorem_battery(cfg, only)
    return (OK if report["passed"] else NEGATIVE), report


# parser ---------------------------------------------------------------------

def _nonneg(x: str) -> float:
    v = float(x)
    if v < 0:
        raise argparse.ArgumentTypeError("tolerance must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--encoding", choices=(FLOAT, RATIONAL),
                        help="convert inputs; rational forces tolerance 0")
    common.add_argument("--tol", type=_nonneg, help=f"float tolerance (default {DEFAULT_FLOAT_TOL})")
    common.add_argument("-o", "--output", help="write the JSON document here instead of stdout")

    parser = argparse.ArgumentParser(prog="bellcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check-phenomenon", parents=[common],
                        help="validity, signal-locality, predictability")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_check_phenomenon)

    sp = sub.add_parser("check-theory", parents=[common], help="D, L, F, JC, FL classification")
    sp.add_argument("input")
    sp.add_argument("--phenomenon", help="also check that the theory reproduces this table")
    sp.add_argument("--fl-mode", choices=(STRONG, WEAK), default=STRONG)
    sp.add_argument("--require", help="comma-separated properties that must hold (else exit 1)")
    sp.set_defaults(func=cmd_check_theory)

    sp = sub.add_parser("solve-lhv", parents=[common], help="LHV model or Bell certificate")
    sp.add_argument("input")
    sp.add_argument("--no-named", action="store_true", help="report the raw LP certificate")
    sp.set_defaults(func=cmd_solve_lhv)

    sp = sub.add_parser("verify", parents=[common], help="re-check a model or certificate")
    sp.add_argument("input")
    sp.add_argument("--phenomenon", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("quantum-gen", parents=[common], help="quantum phenomena and theories")
    sp.add_argument("state", choices=("singlet", "werner", "boxes"))
    sp.add_argument("--v", type=float, help="Werner visibility")
    sp.add_argument("--alice", type=float, nargs="+", default=[0, 90], help="angles in degrees")
    sp.add_argument("--bob", type=float, nargs="+", default=[45, -45], help="angles in degrees")
    sp.add_argument("--plane", choices=("xz", "xy", "yz"), default="xz")
    sp.add_argument("--theory", action="store_true", help="emit the orthodox theory instead")
    sp.set_defaults(func=cmd_quantum_gen)

    sp = sub.add_parser("chsh", parents=[common], help="CHSH value against the local bound 2")
    sp.add_argument("input")
    sp.add_argument("--settings", type=int, nargs=4, metavar=("A0", "A1", "B0", "B1"))
    sp.set_defaults(func=cmd_chsh)

    sp = sub.add_parser("epr-report", parents=[common], help="completeness implication chain")
    sp.add_argument("input", help="theory document")
    sp.add_argument("--phenomenon", required=True)
    sp.set_defaults(func=cmd_epr_report)

    sp = sub.add_parser("battery", parents=[common], help="run the theorem battery")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--only", help="comma-separated item names")
    sp.set_defaults(func=cmd_battery)
    return parser


def _emit(doc, path):
    text = io.dumps(io.jsonable(doc))
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, doc = args.func(args)
    except _Exit as exc:
        code, doc = exc.code, exc.doc
    except io.InputError as exc:
        code, doc = INPUT_ERROR, {"format": "bellcheck.error", "version": io.VERSION,
                                  "kind": "input", "message": str(exc), "pointer": exc.pointer}
    except NumericallyAmbiguous as exc:
        code, doc = AMBIGUOUS, {"format": "bellcheck.error", "version": io.VERSION,
                                "kind": "ambiguous", "message": str(exc), "gap": io.jsonable(exc.gap)}
    except ScenarioTooLarge as exc:
        code, doc = INPUT_ERROR, {"format": "bellcheck.error", "version": io.VERSION,
                                  "kind": "too_large", "message": str(exc), "pointer": "/scenario"}
    except BellCheckError as exc:
        code, doc = INPUT_ERROR, {"format": "bellcheck.error", "version": io.VERSION,
                                  "kind": type(exc).__name__, "message": str(exc), "pointer": ""}
    if doc.get("format") == "bellcheck.error":
        print(f"bellcheck: {doc['message']}", file=sys.stderr)
    _emit(doc, getattr(args, "output", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
