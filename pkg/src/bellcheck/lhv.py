"""Local-deterministic models: LP membership in the local polytope.

A phenomenon has a local hidden-variable model iff it is a convex mixture of
deterministic strategy tables. ``solve_lhv`` decides this with the phase-one
simplex and returns either the mixture weights or a Bell inequality that the
phenomenon violates, read off the Farkas multipliers.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import NotFactorizable, NumericallyAmbiguous, ScenarioTooLarge, ShapeError
from .numerics import frozen, is_exact, to_float
from .scenario import ChshSettings, Phenomenon, Scenario
from .simplex import find_feasible
from .theory import Theory, is_factorizable, is_deterministic, is_local

DEFAULT_CAP = 10**6
# float models reproducing only to within this (or tol, if smaller) are
# treated as boundary cases: rounding alone stays orders of magnitude below
ROUNDING_NOISE = 1e-12
CAP_ENV = "BELLCHECK_STRATEGY_CAP"


def strategy_cap() -> int:
    return int(os.environ.get(CAP_ENV, DEFAULT_CAP))


@dataclass(frozen=True, order=True)
class DeterministicStrategy:
    alpha: tuple  # Alice's outcome for each of her settings
    beta: tuple

    def table(self, scenario: Scenario, exact: bool = True) -> np.ndarray:
        zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        t = np.full(scenario.shape, zero, dtype=object if exact else np.float64)
        for a, b in product(range(scenario.settings_a), range(scenario.settings_b)):
            t[a, b, self.alpha[a], self.beta[b]] = one
        return t

    def label(self) -> str:
        return "alpha=" + ",".join(map(str, self.alpha)) + ";beta=" + ",".join(map(str, self.beta))


def strategy_count(s: Scenario) -> int:
    return s.outcomes_a ** s.settings_a * s.outcomes_b ** s.settings_b


def enumerate_strategies(s: Scenario, cap: int | None = None) -> list[DeterministicStrategy]:
    cap = strategy_cap() if cap is None else cap
    n = strategy_count(s)
    if n > cap:
        raise ScenarioTooLarge(f"{n} deterministic strategies exceed the cap of {cap}")
    alphas = list(product(range(s.outcomes_a), repeat=s.settings_a))
    betas = list(product(range(s.outcomes_b), repeat=s.settings_b))
    return [DeterministicStrategy(al, be) for al in alphas for be in betas]


@dataclass(frozen=True, eq=False)
class LhvModel:
    scenario: Scenario
    strategies: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = self.weights if isinstance(self.weights, np.ndarray) else np.array(self.weights)
        if len(self.strategies) != len(w):
            raise ShapeError("one weight per strategy required")
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "weights", frozen(w))

    @property
    def exact(self) -> bool:
        return is_exact(self.weights)

    def __eq__(self, other):
        if not isinstance(other, LhvModel):
            return NotImplemented
        return (self.scenario == other.scenario and self.strategies == other.strategies
                and self.exact == other.exact and np.array_equal(self.weights, other.weights))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BellCertificate:
    """Linear functional on tables whose maximum over deterministic strategies
    (``local_bound``) is exceeded by the phenomenon's value."""

    scenario: Scenario
    coefficients: np.ndarray
    local_bound: float | Fraction
    phenomenon_value: float | Fraction
    name: str | None = None
    settings: ChshSettings | None = None

    def __post_init__(self):
        c = self.coefficients
        if not isinstance(c, np.ndarray):
            c = np.array(c)
        if c.shape != self.scenario.shape:
            raise ShapeError("certificate coefficients must match the scenario shape")
        object.__setattr__(self, "coefficients", frozen(c))

    @property
    def gap(self):
        return self.phenomenon_value - self.local_bound

    @property
    def exact(self) -> bool:
        return is_exact(self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, BellCertificate):
            return NotImplemented
        return (self.scenario == other.scenario and self.name == other.name
                and self.settings == other.settings
                and self.local_bound == other.local_bound
                and self.phenomenon_value == other.phenomenon_value
                and np.array_equal(self.coefficients, other.coefficients))

    __hash__ = None


def local_bound(coefficients: np.ndarray, scenario: Scenario, cap: int | None = None):
    """Max of the functional over every deterministic strategy (full enumeration)."""
    best = None
    for st in enumerate_strategies(scenario, cap):
        v = sum(coefficients[a, b, st.alpha[a], st.beta[b]]
                for a in range(scenario.settings_a) for b in range(scenario.settings_b))
        if best is None or v > best:
            best = v
    return best


def contract(coefficients: np.ndarray, table: np.ndarray):
    return (coefficients * table).sum()


def _chsh_tensor(scenario: Scenario, s: ChshSettings, minus: int, overall: int, exact: bool):
    """Coefficients of overall * (E00 + E01 + E10 + E11 - 2 E_minus) on the chosen settings."""
    t = np.zeros(scenario.shape, dtype=object if exact else np.float64)
    if exact:
        t[...] = Fraction(0)
    pairs = [(s.a0, s.b0), (s.a0, s.b1), (s.a1, s.b0), (s.a1, s.b1)]
    for idx, (a, b) in enumerate(pairs):
        sgn = -overall if idx == minus else overall
        for A, B in product(range(2), range(2)):
            v = sgn * scenario.values_a[A] * scenario.values_b[B]
            t[a, b, A, B] = Fraction(v) if exact else v
    return t


def chsh_certificate(p: Phenomenon, tol=None) -> BellCertificate | None:
    """Most violated CHSH-type inequality on any two settings per party, if any.

    Covers every choice of the negated term and overall sign; the local bound
    is 2 in this normalization.
    """
    s = p.scenario
    if not (s.is_plus_minus and s.settings_a >= 2 and s.settings_b >= 2):
        return None
    tol = p.tolerance if tol is None else tol
    best = None
    for a0, a1 in ((i, j) for i in range(s.settings_a) for j in range(i + 1, s.settings_a)):
        for b0, b1 in ((i, j) for i in range(s.settings_b) for j in range(i + 1, s.settings_b)):
            cs = ChshSettings(a0, a1, b0, b1)
            for minus, overall in product(range(4), (1, -1)):
                coef = _chsh_tensor(s, cs, minus, overall, p.exact)
                value = contract(coef, p.table)
                if best is None or value > best[0]:
                    best = (value, coef, cs)
    value, coef, cs = best
    if value - 2 <= tol:
        return None
    bound = local_bound(coef, s)
    return BellCertificate(s, coef, bound, value, name="CHSH", settings=cs)


def _constraint_matrix(strategies, scenario: Scenario, exact: bool):
    rows = int(np.prod(scenario.shape)) + 1
    dtype = object if exact else np.float64
    M = np.zeros((rows, len(strategies)), dtype=dtype)
    if exact:
        M[...] = Fraction(0)
    one = Fraction(1) if exact else 1.0
    shape = scenario.shape
    for j, st in enumerate(strategies):
        for a, b in product(range(scenario.settings_a), range(scenario.settings_b)):
            M[np.ravel_multi_index((a, b, st.alpha[a], st.beta[b]), shape), j] = one
        M[-1, j] = one
    return M


def solve_lhv(p: Phenomenon, tol=None, cap: int | None = None, named: bool = True):
    """Return an LhvModel if ``p`` lies in the local polytope, else a BellCertificate.

    Rational phenomena are solved exactly. For float data an answer within
    ``tol`` of the boundary raises NumericallyAmbiguous. With ``named=True``
    a violated CHSH inequality is preferred as the certificate when one exists.
    """
    s = p.scenario
    tol = p.tolerance if tol is None else tol
    strategies = enumerate_strategies(s, cap)
    M = _constraint_matrix(strategies, s, p.exact)
    rhs = np.concatenate([p.table.reshape(-1), np.array([Fraction(1) if p.exact else 1.0],
                                                       dtype=object if p.exact else np.float64)])
    res = find_feasible(M, rhs, tol)

    if res.feasible:
        keep = [j for j, w in enumerate(res.x) if w > 0]
        model = LhvModel(s, [strategies[j] for j in keep], np.array([res.x[j] for j in keep],
                                                                 dtype=res.x.dtype))
        if not p.exact:
            check = verify_model(model, p, min(tol, ROUNDING_NOISE))
            if not check.holds:
                raise NumericallyAmbiguous(
                    f"LP reports feasible but reproduction error is {check.deviation:.3g}",
                    gap=check.deviation)
        return model

    if named:
        cert = chsh_certificate(p, tol)
        if cert is not None:
            return cert
    coef = res.y[:-1].reshape(s.shape)
    scale = max(abs(c) for c in coef.flat)
    coef = coef / scale
    bound = local_bound(coef, s, cap)
    value = contract(coef, p.table)
    cert = BellCertificate(s, coef, bound, value)
    if not p.exact and cert.gap <= tol:
        raise NumericallyAmbiguous(f"Bell violation gap {cert.gap:.3g} is within tolerance",
                                   gap=cert.gap)
    return cert


@dataclass(frozen=True)
class ModelCheck:
    holds: bool
    deviation: float | Fraction
    where: tuple | None

    def __bool__(self):
        return self.holds


def model_table(m: LhvModel) -> np.ndarray:
    s = m.scenario
    exact = m.exact
    t = np.zeros(s.shape, dtype=object if exact else np.float64)
    if exact:
        t[...] = Fraction(0)
    for st, w in zip(m.strategies, m.weights):
        for a, b in product(range(s.settings_a), range(s.settings_b)):
            t[a, b, st.alpha[a], st.beta[b]] += w
    return t


def verify_model(m: LhvModel, p: Phenomenon, tol=None) -> ModelCheck:
    """Re-sum the weighted strategy tables and compare entrywise with ``p``."""
    if m.scenario.shape != p.scenario.shape:
        raise ShapeError("model and phenomenon scenarios differ")
    tol = p.tolerance if tol is None else tol
    if any(w < -tol for w in m.weights) or abs(sum(m.weights) - 1) > tol:
        return ModelCheck(False, abs(sum(m.weights) - 1), None)
    diff = model_table(m) - p.table
    dev, where = 0, None
    for idx, d in np.ndenumerate(diff):
        if abs(d) > dev:
            dev, where = abs(d), idx
    return ModelCheck(bool(dev <= tol), dev, where)


@dataclass(frozen=True)
class CertificateCheck:
    holds: bool
    local_bound: float | Fraction
    phenomenon_value: float | Fraction
    fields_match: bool

    def __bool__(self):
        return self.holds


def verify_certificate(c: BellCertificate, p: Phenomenon, s: Scenario | None = None,
                       cap: int | None = None) -> CertificateCheck:
    s = c.scenario if s is None else s
    if s.shape != p.scenario.shape or c.coefficients.shape != s.shape:
        raise ShapeError("certificate, phenomenon and scenario shapes differ")
    bound = local_bound(c.coefficients, s, cap)
    value = contract(c.coefficients, p.table)
    if c.exact and p.exact:
        match = bound == c.local_bound and value == c.phenomenon_value
    else:
        match = abs(bound - c.local_bound) <= 1e-9 and abs(value - c.phenomenon_value) <= 1e-9
    return CertificateCheck(bool(match and value > bound), bound, value, bool(match))


def determinize(t: Theory, tol=None, cap: int | None = None) -> Theory:
    """Deterministic local theory with the same predictions as a factorizable one.

    Each hidden-variable value is refined by a pair of local response
    functions drawn independently from the local marginals, so every outcome
    becomes a deterministic function of the refined variable and the local
    setting.
    """
    tol = t.tolerance if tol is None else tol
    f = is_factorizable(t, tol)
    if not f.holds:
        raise NotFactorizable(f"theory is not factorizable (witness {f.witness})")
    s = t.scenario
    cap = strategy_cap() if cap is None else cap
    if len(t.lambdas) * strategy_count(s) > cap:
        raise ScenarioTooLarge("determinized theory would exceed the size cap")
    strategies = enumerate_strategies(s, cap)
    pa = t.marginal_a()[:, :, 0, :]  # [l, a, A]; b-independent on the support
    pb = t.marginal_b()[:, 0, :, :]  # [l, b, B]
    labels, mu, kernel = [], [], []
    for lam, label in enumerate(t.lambdas):
        for st in strategies:
            w = t.mu[lam]
            for a, A in enumerate(st.alpha):
                w = w * pa[lam, a, A]
            for b, B in enumerate(st.beta):
                w = w * pb[lam, b, B]
            labels.append(f"{label}|{st.label()}")
            mu.append(w)
            kernel.append(st.table(s, t.exact))
    dtype = object if t.exact else np.float64
    return Theory(s, labels, np.array(mu, dtype=dtype), np.array(kernel, dtype=dtype), t.tolerance)


def model_from_theory(t: Theory, tol=None) -> LhvModel:
    """Collapse a deterministic local theory onto strategy weights."""
    tol = t.tolerance if tol is None else tol
    if not (is_deterministic(t, tol).holds and is_local(t, tol).holds):
        raise NotFactorizable("only deterministic local theories map onto strategies")
    s = t.scenario
    ma, mb = t.marginal_a(), t.marginal_b()
    weights: dict[DeterministicStrategy, object] = {}
    for lam in t.support(tol):
        alpha = tuple(int(np.argmax([float(x) for x in ma[lam, a, 0]])) for a in range(s.settings_a))
        beta = tuple(int(np.argmax([float(x) for x in mb[lam, 0, b]])) for b in range(s.settings_b))
        st = DeterministicStrategy(alpha, beta)
        weights[st] = weights.get(st, 0) + t.mu[lam]
    strategies = sorted(weights)
    dtype = object if t.exact else np.float64
    return LhvModel(s, strategies, np.array([weights[st] for st in strategies], dtype=dtype))


def theory_from_model(m: LhvModel) -> Theory:
    """An LhvModel read as a theory: one hidden-variable value per strategy."""
    dtype = object if m.exact else np.float64
    kernel = np.array([st.table(m.scenario, m.exact) for st in m.strategies], dtype=dtype)
    return Theory(m.scenario, [st.label() for st in m.strategies], m.weights.copy(), kernel)


def model_to_float(m: LhvModel) -> LhvModel:
    return LhvModel(m.scenario, m.strategies, to_float(m.weights))

