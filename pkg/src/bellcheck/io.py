"""Versioned JSON documents for every exchanged object.

Each document carries ``"format"`` (``bellcheck.<kind>``) and ``"version"``.
Rational data is written as "p/q" strings so certificates can be checked
exactly by third-party tools.
"""
from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import BellCheckError
from .lhv import BellCertificate, DeterministicStrategy, LhvModel
from .numerics import FLOAT, RATIONAL, as_array, encode_array, format_number, parse_number
from .quantum import MeasurementSetting, TwoQubitState
from .scenario import ChshSettings, Phenomenon, Scenario
from .theory import PropertyResult, PropertyVector, Theory

VERSION = 1


class InputError(BellCheckError, ValueError):
    """Malformed input document; ``pointer`` is a JSON pointer to the bad field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def jsonable(obj):
    """Recursively convert to JSON-ready values (Fractions become "p/q")."""
    if isinstance(obj, Fraction):
        return format_number(obj, RATIONAL)
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else ",".join(map(str, k)) if isinstance(k, tuple)
                 else str(k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _require(doc, key, pointer=""):
    if not isinstance(doc, dict):
        raise InputError("expected an object", pointer)
    if key not in doc:
        raise InputError(f"missing field {key!r}", pointer)
    return doc[key]


def _check_format(doc, kind):
    fmt = _require(doc, "format")
    if fmt != f"bellcheck.{kind}":
        raise InputError(f"expected format bellcheck.{kind}, got {fmt!r}", "/format")
    version = doc.get("version", VERSION)
    if version != VERSION:
        raise InputError(f"unsupported version {version}", "/version")


def _encoding(doc):
    enc = doc.get("encoding", FLOAT)
    if enc not in (FLOAT, RATIONAL):
        raise InputError(f"unknown encoding {enc!r}", "/encoding")
    return enc


def _number(x, pointer):
    try:
        if isinstance(x, bool) or not isinstance(x, (int, float, str)):
            raise TypeError
        return parse_number(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"not a number: {x!r}", pointer) from None


def _array(data, enc, pointer, shape):
    def walk(node, path, depth):
        if depth == len(shape):
            _number(node, path)
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise InputError(f"expected a list of length {shape[depth]}", path)
        for i, child in enumerate(node):
            walk(child, f"{path}/{i}", depth + 1)
    walk(data, pointer, 0)
    return as_array(data, enc)


# scenario -------------------------------------------------------------------

def scenario_to_dict(s: Scenario) -> dict:
    return {"m_a": s.settings_a, "m_b": s.settings_b, "k_a": s.outcomes_a, "k_b": s.outcomes_b,
            "context": s.context}


def _outcome_values(s: Scenario) -> dict:
    return {"a": None if s.values_a is None else list(s.values_a),
            "b": None if s.values_b is None else list(s.values_b)}


def scenario_from_doc(doc: dict) -> Scenario:
    sd = _require(doc, "scenario")
    vals = doc.get("outcome_values") or {}
    try:
        fields = [int(_require(sd, k, "/scenario")) for k in ("m_a", "m_b", "k_a", "k_b")]
        return Scenario(*fields, context=str(sd.get("context", "c")),
                        values_a=vals.get("a"), values_b=vals.get("b"))
    except BellCheckError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc), "/scenario") from None


def _header(kind: str, s: Scenario) -> dict:
    return {"format": f"bellcheck.{kind}", "version": VERSION, "scenario": scenario_to_dict(s),
            "outcome_values": _outcome_values(s)}


# phenomenon -----------------------------------------------------------------

def phenomenon_to_dict(p: Phenomenon) -> dict:
    doc = _header("phenomenon", p.scenario)
    doc["encoding"] = p.encoding
    doc["tolerance"] = format_number(p.tolerance, p.encoding)
    doc["table"] = encode_array(p.table)
    return doc


def phenomenon_from_dict(doc: dict) -> Phenomenon:
    _check_format(doc, "phenomenon")
    s = scenario_from_doc(doc)
    enc = _encoding(doc)
    table = _array(_require(doc, "table"), enc, "/table", s.shape)
    tol = doc.get("tolerance")
    tol = None if tol is None else _number(tol, "/tolerance")
    if enc == FLOAT and tol is not None:
        tol = float(tol)
    return Phenomenon(s, table, tol)


# theory ---------------------------------------------------------------------

def theory_to_dict(t: Theory) -> dict:
    doc = _header("theory", t.scenario)
    doc["encoding"] = t.encoding
    doc["tolerance"] = format_number(t.tolerance, t.encoding)
    doc["lambdas"] = [jsonable(x) for x in t.lambdas]
    doc["mu"] = encode_array(t.mu)
    doc["kernel"] = encode_array(t.kernel)
    return doc


def theory_from_dict(doc: dict) -> Theory:
    _check_format(doc, "theory")
    s = scenario_from_doc(doc)
    enc = _encoding(doc)
    lambdas = _require(doc, "lambdas")
    if not isinstance(lambdas, list) or not lambdas:
        raise InputError("expected a non-empty list", "/lambdas")
    n = len(lambdas)
    mu = _array(_require(doc, "mu"), enc, "/mu", (n,))
    kernel = _array(_require(doc, "kernel"), enc, "/kernel", (n, *s.shape))
    tol = doc.get("tolerance")
    tol = None if tol is None else _number(tol, "/tolerance")
    if enc == FLOAT and tol is not None:
        tol = float(tol)
    try:
        return Theory(s, [x if isinstance(x, str) else json.dumps(x) for x in lambdas], mu, kernel, tol)
    except BellCheckError as exc:
        raise InputError(str(exc), "/kernel") from None


def property_vector_to_dict(v: PropertyVector) -> dict:
    def entry(r: PropertyResult):
        out = {"status": r.status.value, "deviation": jsonable(r.deviation)}
        if r.witness is not None:
            out["witness"] = {"lambda": r.witness.lam, **jsonable(r.witness.where),
                              "deviation": jsonable(r.witness.deviation)}
        return out
    doc = {"format": "bellcheck.property_vector", "version": VERSION, "fl_mode": v.fl_mode}
    doc.update({name: entry(res) for name, res in v.as_dict().items()})
    return doc


# models and certificates ----------------------------------------------------

def model_to_dict(m: LhvModel) -> dict:
    doc = _header("lhv_model", m.scenario)
    enc = RATIONAL if m.exact else FLOAT
    doc["encoding"] = enc
    doc["strategies"] = [{"alpha": list(st.alpha), "beta": list(st.beta),
                          "weight": format_number(w, enc)}
                         for st, w in zip(m.strategies, m.weights)]
    return doc


def model_from_dict(doc: dict) -> LhvModel:
    _check_format(doc, "lhv_model")
    s = scenario_from_doc(doc)
    enc = _encoding(doc)
    entries = _require(doc, "strategies")
    if not isinstance(entries, list):
        raise InputError("expected a list", "/strategies")
    strategies, weights = [], []
    for i, e in enumerate(entries):
        ptr = f"/strategies/{i}"
        alpha, beta = _require(e, "alpha", ptr), _require(e, "beta", ptr)
        if (not isinstance(alpha, list) or len(alpha) != s.settings_a
                or any(not isinstance(x, int) or not 0 <= x < s.outcomes_a for x in alpha)):
            raise InputError("invalid outcome assignment", ptr + "/alpha")
        if (not isinstance(beta, list) or len(beta) != s.settings_b
                or any(not isinstance(x, int) or not 0 <= x < s.outcomes_b for x in beta)):
            raise InputError("invalid outcome assignment", ptr + "/beta")
        strategies.append(DeterministicStrategy(tuple(alpha), tuple(beta)))
        weights.append(_number(_require(e, "weight", ptr), ptr + "/weight"))
    w = as_array(weights, enc) if weights else np.zeros(0, dtype=object if enc == RATIONAL else float)
    return LhvModel(s, strategies, w)


def certificate_to_dict(c: BellCertificate) -> dict:
    doc = _header("bell_certificate", c.scenario)
    enc = RATIONAL if c.exact else FLOAT
    doc["encoding"] = enc
    doc["name"] = c.name
    doc["settings"] = None if c.settings is None else dataclasses.asdict(c.settings)
    doc["coefficients"] = encode_array(c.coefficients)
    doc["local_bound"] = format_number(c.local_bound, enc)
    doc["phenomenon_value"] = format_number(c.phenomenon_value, enc)
    doc["gap"] = format_number(c.gap, enc)
    return doc


def certificate_from_dict(doc: dict) -> BellCertificate:
    _check_format(doc, "bell_certificate")
    s = scenario_from_doc(doc)
    enc = _encoding(doc)
    coef = _array(_require(doc, "coefficients"), enc, "/coefficients", s.shape)
    bound = _number(_require(doc, "local_bound"), "/local_bound")
    value = _number(_require(doc, "phenomenon_value"), "/phenomenon_value")
    if enc == FLOAT:
        bound, value = float(bound), float(value)
    settings = doc.get("settings")
    cs = None if settings is None else ChshSettings(**settings)
    return BellCertificate(s, coef, bound, value, name=doc.get("name"), settings=cs)


# quantum --------------------------------------------------------------------

def state_to_dict(state: TwoQubitState) -> dict:
    return {"format": "bellcheck.state", "version": VERSION,
            "rho": [[[float(z.real), float(z.imag)] for z in row] for row in state.rho]}


def state_from_dict(doc: dict) -> TwoQubitState:
    _check_format(doc, "state")
    rho = _require(doc, "rho")
    try:
        arr = np.array([[complex(re, im) for re, im in row] for row in rho])
    except (TypeError, ValueError):
        raise InputError("expected a 4x4 array of [re, im] pairs", "/rho") from None
    try:
        return TwoQubitState(arr)
    except BellCheckError as exc:
        raise InputError(str(exc), "/rho") from None


def settings_to_list(settings) -> list:
    return [list(s.bloch) for s in settings]


def settings_from_list(data, pointer="/settings") -> list[MeasurementSetting]:
    try:
        return [MeasurementSetting(tuple(v)) for v in data]
    except (TypeError, BellCheckError) as exc:
        raise InputError(str(exc), pointer) from None


# dispatch -------------------------------------------------------------------

LOADERS = {
    "bellcheck.phenomenon": phenomenon_from_dict,
    "bellcheck.theory": theory_from_dict,
    "bellcheck.lhv_model": model_from_dict,
    "bellcheck.bell_certificate": certificate_from_dict,
    "bellcheck.state": state_from_dict,
}
DUMPERS = {
    Phenomenon: phenomenon_to_dict,
    Theory: theory_to_dict,
    LhvModel: model_to_dict,
    BellCertificate: certificate_to_dict,
    TwoQubitState: state_to_dict,
    PropertyVector: property_vector_to_dict,
}


def to_dict(obj) -> dict:
    try:
        return DUMPERS[type(obj)](obj)
    except KeyError:
        raise TypeError(f"no JSON document type for {type(obj).__name__}") from None


def from_dict(doc):
    if not isinstance(doc, dict):
        raise InputError("expected a JSON object")
    fmt = doc.get("format")
    if fmt not in LOADERS:
        raise InputError(f"unknown format {fmt!r}", "/format")
    return LOADERS[fmt](doc)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_dict(doc)


def load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def save(obj, path) -> None:
    Path(path).write_text(dumps(to_dict(obj)))
