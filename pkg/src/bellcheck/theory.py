"""Hidden-variable theories and the theory-level property checkers.

A theory is a finite set of hidden-variable values with weights ``mu[l]``
and a response kernel ``kernel[l, a, b, A, B] = P(A, B | a, b, l)``. The
weights carry no setting index, so free choice of the settings is built in.

Only hidden-variable values with positive weight are examined by the
checkers, and conditionals whose conditioning mass is at most ``tol`` are
skipped: values that never occur cannot witness anything.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import InternalInconsistency, InvalidTheory, ShapeError
from .numerics import as_array, default_tol, encoding_of, extreme_value, frozen, is_exact, to_float
from .scenario import Phenomenon, Scenario, correlator

STRONG = "strong"
WEAK = "weak"


@dataclass(frozen=True, eq=False)
class Theory:
    scenario: Scenario
    lambdas: tuple
    mu: np.ndarray
    kernel: np.ndarray
    tolerance: float | Fraction | None = None

    def __post_init__(self):
        mu = self.mu if isinstance(self.mu, np.ndarray) else as_array(self.mu)
        kernel = self.kernel if isinstance(self.kernel, np.ndarray) else as_array(self.kernel)
        if is_exact(mu) != is_exact(kernel):
            mu, kernel = to_float(mu), to_float(kernel)
        lambdas = tuple(self.lambdas)
        n = len(lambdas)
        if mu.shape != (n,):
            raise ShapeError(f"mu has shape {mu.shape}, expected ({n},)")
        if kernel.shape != (n, *self.scenario.shape):
            raise ShapeError(f"kernel has shape {kernel.shape}, expected {(n, *self.scenario.shape)}")
        tol = default_tol(kernel) if self.tolerance is None else self.tolerance
        if n == 0:
            raise InvalidTheory("a theory needs at least one hidden-variable value")
        if any(w < -tol for w in mu) or abs(mu.sum() - 1) > tol:
            raise InvalidTheory("mu must be a probability vector")
        if any(v < -tol for v in kernel.flat):
            raise InvalidTheory("kernel has negative entries")
        sums = kernel.sum(axis=(3, 4))
        bad = [idx for idx, s in np.ndenumerate(sums) if abs(s - 1) > tol]
        if bad:
            raise InvalidTheory(f"kernel block (lambda, a, b) = {bad[0]} is not normalized")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "mu", frozen(mu))
        object.__setattr__(self, "kernel", frozen(kernel))
        object.__setattr__(self, "tolerance", tol)

    @property
    def encoding(self) -> str:
        return encoding_of(self.kernel)

    @property
    def exact(self) -> bool:
        return is_exact(self.kernel)

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and self.lambdas == other.lambdas
            and self.encoding == other.encoding
            and self.tolerance == other.tolerance
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.kernel, other.kernel)
        )

    __hash__ = None

    def to_float(self) -> "Theory":
        if not self.exact:
            return self
        return Theory(self.scenario, self.lambdas, to_float(self.mu), to_float(self.kernel))

    def support(self, tol=None) -> list[int]:
        """Indices of hidden-variable values that actually occur."""
        tol = self.tolerance if tol is None else tol
        return [i for i, w in enumerate(self.mu) if w > tol]

    def marginal_a(self) -> np.ndarray:
        """P(A | a, b, l) indexed [l, a, b, A]."""
        return self.kernel.sum(axis=4)

    def marginal_b(self) -> np.ndarray:
        """P(B | a, b, l) indexed [l, a, b, B]."""
        return self.kernel.sum(axis=3)


class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    VACUOUS = "vacuous"


@dataclass(frozen=True)
class Witness:
    lam: int
    where: dict
    deviation: float | Fraction


@dataclass(frozen=True)
class PropertyResult:
    status: Status
    witness: Witness | None = None
    deviation: float | Fraction = 0

    @property
    def holds(self) -> bool:
        """Vacuous satisfaction counts as holding."""
        return self.status is not Status.FAILS

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class PropertyVector:
    deterministic: PropertyResult
    local: PropertyResult
    factorizable: PropertyResult
    jarrett_complete: PropertyResult
    fragile_local: PropertyResult
    fl_mode: str = field(default=STRONG)

    NAMES = ("deterministic", "local", "factorizable", "jarrett_complete", "fragile_local")

    def as_dict(self) -> dict[str, PropertyResult]:
        return {n: getattr(self, n) for n in self.NAMES}

    def flags(self) -> tuple[bool, ...]:
        return tuple(getattr(self, n).holds for n in self.NAMES)


def _tol(t: Theory, tol):
    return t.tolerance if tol is None else tol


def predict(t: Theory) -> Phenomenon:
    table = sum((t.mu[i] * t.kernel[i] for i in range(len(t.lambdas))), 0 * t.kernel[0])
    return Phenomenon(t.scenario, table, t.tolerance)


@dataclass(frozen=True)
class Reproduction:
    holds: bool
    deviation: float | Fraction
    where: tuple | None

    def __bool__(self):
        return self.holds


def reproduces(t: Theory, p: Phenomenon, tol=None) -> Reproduction:
    if t.scenario.shape != p.scenario.shape:
        raise ShapeError(f"theory shape {t.scenario.shape} != phenomenon shape {p.scenario.shape}")
    tol = _tol(t, tol)
    diff = predict(t).table - p.table
    dev, where = 0, None
    for idx, d in np.ndenumerate(diff):
        if abs(d) > dev:
            dev, where = abs(d), idx
    return Reproduction(bool(dev <= tol), dev, where)


def is_deterministic(t: Theory, tol=None) -> PropertyResult:
    tol = _tol(t, tol)
    worst, witness = None, None
    for lam in t.support(tol):
        for (a, b, A, B), v in np.ndenumerate(t.kernel[lam]):
            if extreme_value(v, tol) is None:
                dev = min(v, 1 - v)
                if worst is None or dev > worst:
                    worst = dev
                    witness = Witness(lam, {"a": a, "b": b, "A": A, "B": B}, dev)
    if witness is None:
        return PropertyResult(Status.HOLDS)
    return PropertyResult(Status.FAILS, witness, worst)


def _setting_dependence(marg, lam_list, local_key, remote_key, out_key):
    """Max spread of a local marginal over the remote setting.

    ``marg`` is indexed [l, remote, local, outcome].
    """
    best, witness = 0, None
    for lam in lam_list:
        m = marg[lam]
        n_remote, n_local, k = m.shape
        for j, o in product(range(n_local), range(k)):
            col = [m[i, j, o] for i in range(n_remote)]
            hi = max(range(n_remote), key=col.__getitem__)
            lo = min(range(n_remote), key=col.__getitem__)
            dev = col[hi] - col[lo]
            if dev > best:
                best = dev
                witness = Witness(lam, {remote_key: hi, remote_key + "'": lo, local_key: j,
                                        out_key: o}, dev)
    return best, witness


def _locality_deviation(t: Theory, tol):
    lam_list = t.support(tol)
    bob = t.marginal_b()  # [l, a, b, B]: remote a, local b
    alice = t.marginal_a().transpose(0, 2, 1, 3)  # [l, b, a, A]: remote b, local a
    bdev, bw = _setting_dependence(bob, lam_list, "b", "a", "B")
    adev, aw = _setting_dependence(alice, lam_list, "a", "b", "A")
    return (bdev, bw) if bdev >= adev else (adev, aw)


def is_local(t: Theory, tol=None) -> PropertyResult:
    tol = _tol(t, tol)
    dev, witness = _locality_deviation(t, tol)
    if dev > tol:
        return PropertyResult(Status.FAILS, witness, dev)
    if t.scenario.settings_a == 1 and t.scenario.settings_b == 1:
        return PropertyResult(Status.VACUOUS, deviation=dev)
    return PropertyResult(Status.HOLDS, deviation=dev)


def is_factorizable(t: Theory, tol=None) -> PropertyResult:
    tol = _tol(t, tol)
    ma, mb = t.marginal_a(), t.marginal_b()
    worst, witness = 0, None
    for lam in t.support(tol):
        for (a, b, A, B), v in np.ndenumerate(t.kernel[lam]):
            dev = abs(v - ma[lam, a, b, A] * mb[lam, a, b, B])
            if dev > worst:
                worst, witness = dev, Witness(lam, {"a": a, "b": b, "A": A, "B": B}, dev)
    if worst > tol:
        return PropertyResult(Status.FAILS, witness, worst)
    loc = is_local(t, tol)
    if not loc.holds:
        return PropertyResult(Status.FAILS, loc.witness, loc.deviation)
    return PropertyResult(Status.HOLDS, deviation=max(worst, loc.deviation))


def is_jarrett_complete(t: Theory, tol=None) -> PropertyResult:
    tol = _tol(t, tol)
    ma, mb = t.marginal_a(), t.marginal_b()
    s = t.scenario
    worst, witness = 0, None
    for lam in t.support(tol):
        for a, b in product(range(s.settings_a), range(s.settings_b)):
            block = t.kernel[lam, a, b]
            for A in range(s.outcomes_a):
                mass = ma[lam, a, b, A]
                if mass <= tol:
                    continue
                for B in range(s.outcomes_b):
                    dev = abs(block[A, B] / mass - mb[lam, a, b, B])
                    if dev > worst:
                        worst = dev
                        witness = Witness(lam, {"a": a, "b": b, "given A": A, "B": B}, dev)
            for B in range(s.outcomes_b):
                mass = mb[lam, a, b, B]
                if mass <= tol:
                    continue
                for A in range(s.outcomes_a):
                    dev = abs(block[A, B] / mass - ma[lam, a, b, A])
                    if dev > worst:
                        worst = dev
                        witness = Witness(lam, {"a": a, "b": b, "given B": B, "A": A}, dev)
    if worst > tol:
        return PropertyResult(Status.FAILS, witness, worst)
    return PropertyResult(Status.HOLDS, deviation=worst)


def _fragile_side(marg, lam_list, tol, mode, remote_key, local_key, out_key):
    """Returns (any_extreme, worst_deviation, witness) for one party."""
    any_extreme, worst, witness = False, 0, None
    for lam in lam_list:
        m = marg[lam]  # [remote, local, outcome]
        n_remote, n_local, k = m.shape
        for j, o in product(range(n_local), range(k)):
            col = [m[i, j, o] for i in range(n_remote)]
            ext = [i for i in range(n_remote) if extreme_value(col[i], tol) is not None]
            if not ext:
                continue
            any_extreme = True
            others = range(n_remote) if mode == STRONG else ext
            for i in ext:
                for i2 in others:
                    dev = abs(col[i] - col[i2])
                    if dev > worst:
                        worst = dev
                        witness = Witness(lam, {remote_key: i, remote_key + "'": i2,
                                                local_key: j, out_key: o}, dev)
    return any_extreme, worst, witness


def is_fragile_local(t: Theory, tol=None, mode: str = STRONG) -> PropertyResult:
    """Wherever a local outcome probability is 0 or 1 for some remote setting,
    it must take that value for every remote setting.

    ``mode="weak"`` only requires the remote settings that give extreme values
    to agree with each other.
    """
    if mode not in (STRONG, WEAK):
        raise ValueError("mode must be 'strong' or 'weak'")
    tol = _tol(t, tol)
    lam_list = t.support(tol)
    bob = t.marginal_b()
    alice = t.marginal_a().transpose(0, 2, 1, 3)
    eb, db, wb = _fragile_side(bob, lam_list, tol, mode, "a", "b", "B")
    ea, da, wa = _fragile_side(alice, lam_list, tol, mode, "b", "a", "A")
    dev, witness = (db, wb) if db >= da else (da, wa)
    if dev > tol:
        return PropertyResult(Status.FAILS, witness, dev)
    if not (ea or eb):
        return PropertyResult(Status.VACUOUS)
    return PropertyResult(Status.HOLDS, deviation=dev)


def classify(t: Theory, tol=None, fl_mode: str = STRONG) -> PropertyVector:
    """Run all five checkers and cross-check the implications between them.

    Raises InternalInconsistency if F <=> L & JC, D => JC or L => FL fails,
    which can only mean a checker is wrong.
    """
    tol = _tol(t, tol)
    vec = PropertyVector(
        deterministic=is_deterministic(t, tol),
        local=is_local(t, tol),
        factorizable=is_factorizable(t, tol),
        jarrett_complete=is_jarrett_complete(t, tol),
        fragile_local=is_fragile_local(t, tol, fl_mode),
        fl_mode=fl_mode,
    )
    d, loc, f, jc, fl = vec.flags()
    if f != (loc and jc):
        raise InternalInconsistency(f"F={f} but L={loc}, JC={jc}")
    if d and not jc:
        raise InternalInconsistency("deterministic theory reported as not Jarrett-complete")
    if loc and not fl:
        raise InternalInconsistency("local theory reported as not fragile-local")
    return vec


@dataclass(frozen=True)
class AveragedCorrelator:
    value: float | Fraction
    abar: tuple | None = None
    bbar: tuple | None = None
    reason: str | None = None

    @property
    def decomposed(self) -> bool:
        return self.abar is not None


def averaged_correlator(t: Theory, a: int, b: int, tol=None) -> AveragedCorrelator:
    """<AB> at (a, b), plus the local-average decomposition when factorizable.

    For a factorizable theory <AB> = sum_l mu(l) Abar(a, l) Bbar(b, l) where
    Abar, Bbar are the local mean outcome values given l.
    """
    tol = _tol(t, tol)
    value = correlator(predict(t), a, b)
    f = is_factorizable(t, tol)
    if not f.holds:
        return AveragedCorrelator(value, reason="not factorizable")
    va = np.array(t.scenario.values_a, dtype=object)
    vb = np.array(t.scenario.values_b, dtype=object)
    ma, mb = t.marginal_a(), t.marginal_b()
    abar = tuple((va * ma[lam, a, b]).sum() for lam in range(len(t.lambdas)))
    bbar = tuple((vb * mb[lam, a, b]).sum() for lam in range(len(t.lambdas)))
    if not t.exact:
        abar = tuple(float(x) for x in abar)
        bbar = tuple(float(x) for x in bbar)
    total = sum(t.mu[i] * abar[i] * bbar[i] for i in range(len(t.lambdas)))
    # dominant error is the factorization slack: up to k_A*k_B*tol
    slack = tol * t.scenario.outcomes_a * t.scenario.outcomes_b + (0 if t.exact else 1e-12)
    if abs(total - value) > slack:
        raise InternalInconsistency(f"decomposition {total} != correlator {value}")
    return AveragedCorrelator(value, abar, bbar)
