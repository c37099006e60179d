"""Packaged theorem battery.

Each item regenerates its instances from ``default_rng([seed, index])`` and
checks a theorem on them against an independent oracle (``predict``,
``verify_model``, direct property checks). The report is plain JSON data.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import generators as gen
from .epr import check_completeness_implication, check_jcfl_implies_rep, check_lc_predictability
from .errors import BellCheckError
from .io import jsonable
from .lhv import BellCertificate, LhvModel, determinize, solve_lhv, verify_model
from .numerics import DEFAULT_FLOAT_TOL, FLOAT, RATIONAL
from .quantum import (
    MeasurementSetting,
    born_phenomenon,
    boxes_oqm_theory,
    boxes_phenomenon,
    chsh_optimal_settings,
    singlet,
    singlet_oqm_theory,
)
from .scenario import Phenomenon, Scenario, chsh_value, is_predictable, is_signal_local, rationalize
from .theory import (
    Status,
    Theory,
    classify,
    is_deterministic,
    is_factorizable,
    is_jarrett_complete,
    is_local,
    predict,
    reproduces,
)

FORMAT = "bellcheck.battery_report"
VERSION = 1
MAX_WITNESSES = 5
TWO_BY_TWO = Scenario(2, 2, 2, 2, context="battery")
# both parties measure at 0, 90, 45 and -45 degrees: every Bob setting has a
# perfectly anticorrelated partner on Alice's side and CHSH is maximally violated
PERFECT_ANGLES = (0, 90, 45, -45)


@dataclass(frozen=True)
class BatteryConfig:
    seed: int = 42
    encoding: str = FLOAT
    tol: float | None = None
    n_fine: int = 100
    n_jarrett: int = 1000
    n_determinism: int = 1000
    n_predictability: int = 100
    n_jcfl: int = 1000
    corrupt_determinize: bool = False  # fault injection for the Fine item

    def __post_init__(self):
        if self.encoding not in (FLOAT, RATIONAL):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.tol is not None and self.tol < 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def tolerance(self):
        if self.encoding == RATIONAL:
            return Fraction(0)
        return DEFAULT_FLOAT_TOL if self.tol is None else self.tol


class _Item:
    """Accumulates instance outcomes for one battery entry."""

    def __init__(self, seed):
        self.seed = seed
        self.instances = 0
        self.failures = 0
        self.witnesses = []
        self.details = {}

    def record(self, ok: bool, witness=None):
        self.instances += 1
        if not ok:
            self.failures += 1
            if len(self.witnesses) < MAX_WITNESSES:
                self.witnesses.append({"instance": self.instances - 1, **(witness or {})})

    def report(self) -> dict:
        out = {"verdict": "pass" if self.instances and not self.failures else "fail",
               "instances": self.instances, "failures": self.failures, "seed": self.seed,
               "witnesses": self.witnesses}
        out.update(self.details)
        return jsonable(out)


def _encode_theory(t: Theory, cfg: BatteryConfig) -> Theory:
    return t if cfg.encoding == RATIONAL else t.to_float()


def _encode_phenomenon(p: Phenomenon, cfg: BatteryConfig) -> Phenomenon:
    if cfg.encoding == RATIONAL:
        return rationalize(p)
    return p


def _rational_single(t: Theory, p: Phenomenon) -> Theory:
    """Rational copy of a one-lambda theory whose lone kernel is the Born table
    behind ``p``; reuses the rationalized table so the two agree exactly."""
    return Theory(t.scenario, t.lambdas, np.array([Fraction(1)], dtype=object), p.table[None].copy())


def _flags(t: Theory, tol) -> dict:
    v = classify(t, tol)
    return {name: r.status.value for name, r in v.as_dict().items()}


def _corrupted(t: Theory, tol) -> Theory:
    """determinize with the weights cyclically shifted (wrong mixture)."""
    d = determinize(t, tol)
    return Theory(d.scenario, d.lambdas, np.roll(d.mu, 1), d.kernel, d.tolerance)


# items ----------------------------------------------------------------------

def bell_item(cfg: BatteryConfig, seed) -> dict:
    """No LHV model for the singlet at CHSH-optimal settings (gap > 0.8)."""
    item = _Item(seed)
    a, b = chsh_optimal_settings()
    p = _encode_phenomenon(born_phenomenon(singlet(), a, b), cfg)
    res = solve_lhv(p, cfg.tolerance)
    ok = isinstance(res, BellCertificate) and res.gap > Fraction(4, 5)
    item.record(ok, {"result": type(res).__name__})
    item.details["chsh"] = chsh_value(p)
    if isinstance(res, BellCertificate):
        item.details.update(certificate=res.name, local_bound=res.local_bound,
                            phenomenon_value=res.phenomenon_value, gap=res.gap)
    return item.report()


def fine_item(cfg: BatteryConfig, seed) -> dict:
    """Factorizable => deterministic local refinement with the same predictions,
    and every model found by the LP re-verifies."""
    item = _Item(seed)
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance
    check_tol = tol if cfg.encoding == RATIONAL else DEFAULT_FLOAT_TOL
    make = _corrupted if cfg.corrupt_determinize else determinize
    for _ in range(cfg.n_fine):
        t = _encode_theory(gen.factorizable_theory(rng, TWO_BY_TWO, int(rng.integers(1, 4))), cfg)
        p = predict(t)
        d = make(t, tol)
        flags = _flags(d, tol)
        rep = reproduces(d, p, check_tol)
        model = solve_lhv(p, tol)
        remodel = isinstance(model, LhvModel) and verify_model(model, p, check_tol).holds
        ok = all(v != Status.FAILS.value for v in flags.values()) and rep.holds and remodel
        item.record(ok, {"flags": flags, "reproduction_deviation": rep.deviation,
                         "lp_model_verified": remodel})
    return item.report()


def jarrett_item(cfg: BatteryConfig, seed) -> dict:
    """F <=> L and JC on random theories of every generated kind."""
    item = _Item(seed)
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance
    kinds = {}
    for _ in range(cfg.n_jarrett):
        kind = gen.KINDS[int(rng.integers(len(gen.KINDS)))]
        t = _encode_theory(gen.random_theory(rng, kind=kind), cfg)
        f, l_, jc = is_factorizable(t, tol), is_local(t, tol), is_jarrett_complete(t, tol)
        kinds[kind] = kinds.get(kind, 0) + 1
        item.record(f.holds == (l_.holds and jc.holds),
                    {"kind": kind, "F": f.status.value, "L": l_.status.value, "JC": jc.status.value})
    item.details["kinds"] = dict(sorted(kinds.items()))
    return item.report()


def determinism_item(cfg: BatteryConfig, seed) -> dict:
    """Determinism implies Jarrett-completeness."""
    item = _Item(seed)
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance
    for _ in range(cfg.n_determinism):
        t = _encode_theory(gen.deterministic_theory(rng, gen.random_scenario(rng),
                                                    int(rng.integers(1, 4)),
                                                    local=bool(rng.integers(2))), cfg)
        d, jc = is_deterministic(t, tol), is_jarrett_complete(t, tol)
        item.record(d.holds and jc.holds, {"D": d.status.value, "JC": jc.status.value})
    return item.report()


def lc_predictability_item(cfg: BatteryConfig, seed) -> dict:
    """Factorizable + predictable outcome => that outcome is predetermined."""
    item = _Item(seed)
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance
    for _ in range(cfg.n_predictability):
        t, (a0, b0) = gen.predictable_factorizable_theory(rng, gen.random_scenario(rng))
        t = _encode_theory(t, cfg)
        res = check_lc_predictability(t, tol)
        ok = res.holds and (a0, b0, "bob") in res.pairs
        item.record(ok, {"pair": [a0, b0], "witnesses": res.witnesses[:2]})
    return item.report()


def jcfl_item(cfg: BatteryConfig, seed) -> dict:
    """JC and FL => every predictable outcome is represented (strong form)."""
    item = _Item(seed)
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance
    checked = 0
    for _ in range(cfg.n_jcfl):
        t, (a0, b0) = gen.jcfl_theory(rng, gen.random_scenario(rng))
        t = _encode_theory(t, cfg)
        p = predict(t)
        try:
            res = check_jcfl_implies_rep(t, p, tol)
        except BellCheckError as exc:
            item.record(False, {"error": str(exc)})
            continue
        checked += res.checked
        ok = res.holds and res.checked > 0 and is_predictable(p, a0, b0, tol)
        item.record(ok, {"pair": [a0, b0], "witnesses": res.witnesses[:2]})
    item.details["implications_checked"] = checked
    return item.report()


def einstein_boxes_item(cfg: BatteryConfig, seed) -> dict:
    """Boxes phenomenon has an LHV model, yet its orthodox theory is not factorizable."""
    item = _Item(seed)
    p = boxes_phenomenon() if cfg.encoding == RATIONAL else boxes_phenomenon().to_float()
    t = boxes_oqm_theory() if cfg.encoding == RATIONAL else boxes_oqm_theory().to_float()
    tol = cfg.tolerance
    model = solve_lhv(p, tol)
    ok_model = isinstance(model, LhvModel) and verify_model(model, p, tol).holds
    item.record(ok_model, {"result": type(model).__name__})
    flags = _flags(t, tol)
    item.record(flags["factorizable"] == Status.FAILS.value, {"flags": flags})
    if isinstance(model, LhvModel):
        item.details["model"] = [{"strategy": st.label(), "weight": w}
                                 for st, w in zip(model.strategies, model.weights)]
    item.details["oqm_flags"] = flags
    return item.report()


def _perfect_singlet(cfg):
    settings = [MeasurementSetting.from_angle(x) for x in PERFECT_ANGLES]
    p = _encode_phenomenon(born_phenomenon(singlet(), settings, settings), cfg)
    t = singlet_oqm_theory(settings, settings)
    return p, (_rational_single(t, p) if cfg.encoding == RATIONAL else t)


def _chsh_singlet(cfg):
    a, b = chsh_optimal_settings()
    p = _encode_phenomenon(born_phenomenon(singlet(), a, b), cfg)
    t = singlet_oqm_theory(a, b)
    return p, (_rational_single(t, p) if cfg.encoding == RATIONAL else t)


def classification_item(cfg: BatteryConfig, seed) -> dict:
    """Orthodox QM satisfies L but violates JC; a deterministic account violates L.

    Dichotomies: every theory reproducing the CHSH singlet table violates
    L or JC; on the perfect-correlation singlet table every reproducing theory
    violates FL or JC, and FL or D.
    """
    item = _Item(seed)
    tol = cfg.tolerance
    expected = {"deterministic": "fails", "local": "holds", "factorizable": "fails",
                "jarrett_complete": "fails"}
    p_chsh, oqm_chsh = _chsh_singlet(cfg)
    flags = _flags(oqm_chsh, tol)
    item.record(all(flags[k] == v for k, v in expected.items())
                and flags["fragile_local"] != "fails", {"oqm_flags": flags})
    item.details["oqm_flags"] = flags

    toy = _encode_theory(gen.nonlocal_toy_theory(), cfg)
    toy_flags = _flags(toy, tol)
    item.record(toy_flags["deterministic"] == "holds" and toy_flags["local"] == "fails"
                and toy_flags["factorizable"] == "fails"
                and toy_flags["jarrett_complete"] == "holds", {"toy_flags": toy_flags})
    item.details["toy_flags"] = toy_flags

    dichotomies = []
    p_perf, oqm_perf = _perfect_singlet(cfg)
    for label, p, oqm, tests in (
            ("chsh", p_chsh, oqm_chsh, (("local", "jarrett_complete"),)),
            ("perfect", p_perf, oqm_perf, (("fragile_local", "jarrett_complete"),
                                           ("fragile_local", "deterministic")))):
        item.record(is_signal_local(p, tol).holds, {"phenomenon": label, "signal_local": False})
        item.record(isinstance(solve_lhv(p, tol), BellCertificate),
                    {"phenomenon": label, "bell_violation": False})
        for name, t in (("oqm", oqm), ("bohm_like", gen.bohm_like_theory(p))):
            f = _flags(t, tol)
            rep = reproduces(t, p, tol if cfg.encoding == RATIONAL else DEFAULT_FLOAT_TOL)
            for x, y in tests:
                ok = rep.holds and (f[x] == "fails" or f[y] == "fails")
                dichotomies.append({"phenomenon": label, "theory": name,
                                    "violates_one_of": [x, y], "holds": ok})
                item.record(ok, {"phenomenon": label, "theory": name, "flags": f})
    item.details["dichotomies"] = dichotomies
    return item.report()


def epr_completeness_item(cfg: BatteryConfig, seed) -> dict:
    """Orthodox QM is not EPR-complete: each of Bob's settings is an element
    of reality the theory does not represent."""
    item = _Item(seed)
    tol = cfg.tolerance
    p, oqm = _perfect_singlet(cfg)
    report = check_completeness_implication(oqm, p, tol if cfg.encoding == RATIONAL
                                            else DEFAULT_FLOAT_TOL)
    for step in report.chain:
        item.record(step.checked and step.consequent is False,
                    {"b": step.b, "antecedent": step.antecedent, "consequent": step.consequent})
    item.details["failing_directions"] = [
        {"b": s.b, "witness_a": s.witness_a, "rep_witness": s.witness} for s in report.failures()]
    return item.report()


ITEMS = (
    ("bell", bell_item),
    ("fine", fine_item),
    ("jarrett", jarrett_item),
    ("determinism_jc", determinism_item),
    ("lc_predictability", lc_predictability_item),
    ("jcfl", jcfl_item),
    ("einstein_boxes", einstein_boxes_item),
    ("classification", classification_item),
    ("epr_completeness", epr_completeness_item),
)


def run_item(name: str, cfg: BatteryConfig) -> dict:
    idx = [n for n, _ in ITEMS].index(name)
    return dict(ITEMS)[name](cfg, [cfg.seed, idx])


def run_theorem_battery(config: BatteryConfig | None = None, only=None) -> dict:
    cfg = BatteryConfig() if config is None else config
    items = {}
    for name, _ in ITEMS:
        if only is None or name in only:
            items[name] = run_item(name, cfg)
    return jsonable({
        "format": FORMAT,
        "version": VERSION,
        "config": asdict(cfg),
        "tolerance": cfg.tolerance,
        "items": items,
        "passed": all(v["verdict"] == "pass" for v in items.values()),
    })
