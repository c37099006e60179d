"""Scenarios, phenomena and the theory-free checks on observed tables.

A phenomenon table is indexed ``table[a, b, A, B]`` and holds the relative
frequency of outcomes (A, B) given settings (a, b) for a fixed preparation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import InvalidPhenomenon, ShapeError, UnsupportedOutcomeMap
from .numerics import (
    as_array,
    default_tol,
    encoding_of,
    extreme_value,
    frozen,
    is_exact,
    to_float,
    to_rational,
)

PLUS_MINUS = (1, -1)


@dataclass(frozen=True)
class Scenario:
    """Shape of a two-party experiment.

    ``values_a``/``values_b`` map outcome indices to real values. Two-outcome
    parties default to index 0 -> +1, index 1 -> -1; other outcome counts
    default to no map.
    """

    settings_a: int
    settings_b: int
    outcomes_a: int
    outcomes_b: int
    context: str = "c"
    values_a: tuple | None = None
    values_b: tuple | None = None

    def __post_init__(self):
        for name in ("settings_a", "settings_b", "outcomes_a", "outcomes_b"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ShapeError(f"{name} must be a positive integer, got {v!r}")
        for side, k in (("a", self.outcomes_a), ("b", self.outcomes_b)):
            vals = getattr(self, f"values_{side}")
            if vals is None and k == 2:
                vals = PLUS_MINUS
            if vals is not None:
                vals = tuple(vals)
                if len(vals) != k:
                    raise ShapeError(f"values_{side} needs {k} entries, got {len(vals)}")
            object.__setattr__(self, f"values_{side}", vals)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.settings_a, self.settings_b, self.outcomes_a, self.outcomes_b)

    @property
    def is_plus_minus(self) -> bool:
        return (
            self.values_a is not None
            and self.values_b is not None
            and set(self.values_a) == {1, -1}
            and set(self.values_b) == {1, -1}
        )

    def with_settings(self, settings_a: int, settings_b: int) -> "Scenario":
        return Scenario(settings_a, settings_b, self.outcomes_a, self.outcomes_b,
                        self.context, self.values_a, self.values_b)


@dataclass(frozen=True, eq=False)
class Phenomenon:
    scenario: Scenario
    table: np.ndarray
    tolerance: float | Fraction | None = None

    def __post_init__(self):
        table = as_array(self.table) if not isinstance(self.table, np.ndarray) else self.table
        if table.dtype != object:
            table = table.astype(np.float64)
        if table.shape != self.scenario.shape:
            raise ShapeError(f"table shape {table.shape} != scenario shape {self.scenario.shape}")
        object.__setattr__(self, "table", frozen(table))
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", default_tol(table))
        elif self.tolerance < 0:
            raise InvalidPhenomenon("tolerance must be nonnegative")

    @property
    def encoding(self) -> str:
        return encoding_of(self.table)

    @property
    def exact(self) -> bool:
        return is_exact(self.table)

    def __eq__(self, other):
        if not isinstance(other, Phenomenon):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and self.encoding == other.encoding
            and self.tolerance == other.tolerance
            and np.array_equal(self.table, other.table)
        )

    __hash__ = None

    def to_float(self) -> "Phenomenon":
        if not self.exact:
            return self
        return Phenomenon(self.scenario, to_float(self.table))

    def normalized(self) -> "Phenomenon":
        """Clamp entries into [0, 1] and rescale each (a, b) block to sum to 1."""
        t = self.table.copy()
        t[t < 0] = 0
        t[t > 1] = 1
        sums = t.sum(axis=(2, 3), keepdims=True)
        if np.any(sums == 0):
            raise InvalidPhenomenon("a settings block has zero total mass")
        return Phenomenon(self.scenario, t / sums, self.tolerance)

    def restrict(self, settings_a, settings_b) -> "Phenomenon":
        """Sub-phenomenon on the listed setting indices (in the given order)."""
        t = self.table[np.ix_(list(settings_a), list(settings_b))]
        return Phenomenon(self.scenario.with_settings(len(settings_a), len(settings_b)), t,
                          self.tolerance)

    def permuted(self, perm_a=None, perm_b=None, out_a=None, out_b=None) -> "Phenomenon":
        """Relabel settings/outcomes: new index i takes old index perm[i].

        Outcome relabeling also permutes the value maps so correlators are unchanged.
        """
        s = self.scenario
        perm_a = list(range(s.settings_a)) if perm_a is None else list(perm_a)
        perm_b = list(range(s.settings_b)) if perm_b is None else list(perm_b)
        out_a = list(range(s.outcomes_a)) if out_a is None else list(out_a)
        out_b = list(range(s.outcomes_b)) if out_b is None else list(out_b)
        t = self.table[np.ix_(perm_a, perm_b, out_a, out_b)]
        va = None if s.values_a is None else tuple(s.values_a[i] for i in out_a)
        vb = None if s.values_b is None else tuple(s.values_b[i] for i in out_b)
        scen = Scenario(s.settings_a, s.settings_b, s.outcomes_a, s.outcomes_b, s.context, va, vb)
        return Phenomenon(scen, t, self.tolerance)


@dataclass(frozen=True)
class ChshSettings:
    a0: int = 0
    a1: int = 1
    b0: int = 0
    b1: int = 1

    def check(self, scenario: Scenario) -> None:
        if self.a0 == self.a1 or self.b0 == self.b1:
            raise ShapeError("CHSH needs two distinct settings per party")
        for i in (self.a0, self.a1):
            if not 0 <= i < scenario.settings_a:
                raise ShapeError(f"Alice setting {i} out of range")
        for j in (self.b0, self.b1):
            if not 0 <= j < scenario.settings_b:
                raise ShapeError(f"Bob setting {j} out of range")


@dataclass(frozen=True)
class Violation:
    kind: str  # "normalization" | "negative" | "above_one"
    a: int
    b: int
    magnitude: float | Fraction
    A: int | None = None
    B: int | None = None


def validate_phenomenon(p: Phenomenon) -> list[Violation]:
    tol = p.tolerance
    report = []
    sums = p.table.sum(axis=(2, 3))
    for (a, b), s in np.ndenumerate(sums):
        if abs(s - 1) > tol:
            report.append(Violation("normalization", a, b, abs(s - 1)))
    for (a, b, A, B), v in np.ndenumerate(p.table):
        if v < -tol:
            report.append(Violation("negative", a, b, -v, A, B))
        elif v > 1 + tol:
            report.append(Violation("above_one", a, b, v - 1, A, B))
    return report


def conditional_marginal_b(p: Phenomenon, a: int, b: int) -> np.ndarray:
    """f(B|a,b), summing Alice's outcome out."""
    return p.table[a, b].sum(axis=0)


def conditional_marginal_a(p: Phenomenon, a: int, b: int) -> np.ndarray:
    """f(A|a,b), summing Bob's outcome out."""
    return p.table[a, b].sum(axis=1)


@dataclass(frozen=True)
class SignalLocality:
    holds: bool
    bob_deviation: float | Fraction
    bob_witness: tuple | None  # (a, a', b, B)
    alice_deviation: float | Fraction
    alice_witness: tuple | None  # (b, b', a, A)

    def __bool__(self):
        return self.holds


def _remote_dependence(marg: np.ndarray):
    """Largest spread of a local marginal across the remote setting.

    ``marg`` is indexed [remote, local, outcome]. Returns (deviation, witness)
    with witness (remote_hi, remote_lo, local, outcome).
    """
    best, witness = 0, None
    n_remote, n_local, k = marg.shape
    for j, o in product(range(n_local), range(k)):
        col = list(marg[:, j, o])
        hi = max(range(n_remote), key=lambda i: col[i])
        lo = min(range(n_remote), key=lambda i: col[i])
        dev = col[hi] - col[lo]
        if dev > best:
            best, witness = dev, (hi, lo, j, o)
    return best, witness


def is_signal_local(p: Phenomenon, tol=None) -> SignalLocality:
    tol = p.tolerance if tol is None else tol
    bob = p.table.sum(axis=2)  # [a, b, B]
    alice = p.table.sum(axis=3).transpose(1, 0, 2)  # [b, a, A]
    bdev, bw = _remote_dependence(bob)
    adev, aw = _remote_dependence(alice)
    return SignalLocality(bool(bdev <= tol and adev <= tol), bdev, bw, adev, aw)


def is_predictable(p: Phenomenon, a: int, b: int, tol=None, direction: str = "bob") -> bool:
    """Whether one party's outcome is a function of the other's at (a, b).

    ``direction="bob"`` asks if B is fixed by A (the remote measurement ``a``
    predicts Bob's quantity); ``"alice"`` is the mirror. Conditioning outcomes
    with mass <= tol are skipped.
    """
    tol = p.tolerance if tol is None else tol
    block = p.table[a, b]
    if direction == "alice":
        block = block.T
    elif direction != "bob":
        raise ValueError("direction must be 'bob' or 'alice'")
    for A in range(block.shape[0]):
        mass = block[A].sum()
        if mass <= tol:
            continue
        for B in range(block.shape[1]):
            if extreme_value(block[A, B] / mass, tol) is None:
                return False
    return True


def correlator(p: Phenomenon, a: int, b: int):
    s = p.scenario
    if not s.is_plus_minus:
        raise UnsupportedOutcomeMap("correlator needs +1/-1 outcome maps on both sides")
    total = 0
    for A, B in product(range(s.outcomes_a), range(s.outcomes_b)):
        total = total + s.values_a[A] * s.values_b[B] * p.table[a, b, A, B]
    return total


def chsh_value(p: Phenomenon, s: ChshSettings = ChshSettings()):
    s.check(p.scenario)
    return (correlator(p, s.a0, s.b0) + correlator(p, s.a0, s.b1)
            + correlator(p, s.a1, s.b0) - correlator(p, s.a1, s.b1))


def rationalize(p: Phenomenon, max_denominator: int = 10**12) -> Phenomenon:
    """Exact rational copy of a float phenomenon.

    Local marginals are rounded first and the joint table is rebuilt from
    them, so a signal-local input stays exactly signal-local and exactly
    normalized. Entries are rounded to ``max_denominator``.
    """
    if p.exact:
        return p
    m_a, m_b, k_a, k_b = p.scenario.shape
    t = p.table

    def rnd(x):
        return Fraction(float(x)).limit_denominator(max_denominator)

    # averaged over the remote setting; equal to any single one for signal-local data
    marg_a = t.sum(axis=3).mean(axis=1)  # [a, A]
    marg_b = t.sum(axis=2).mean(axis=0)  # [b, B]

    def rounded_dist(vec):
        out = [rnd(v) for v in vec[:-1]]
        out.append(1 - sum(out, Fraction(0)))
        return out

    ra = [rounded_dist(marg_a[a]) for a in range(m_a)]
    rb = [rounded_dist(marg_b[b]) for b in range(m_b)]
    out = np.empty(t.shape, dtype=object)
    for a, b in product(range(m_a), range(m_b)):
        for A, B in product(range(k_a - 1), range(k_b - 1)):
            out[a, b, A, B] = rnd(t[a, b, A, B])
        for A in range(k_a - 1):
            out[a, b, A, k_b - 1] = ra[a][A] - sum((out[a, b, A, B] for B in range(k_b - 1)), Fraction(0))
        for B in range(k_b):
            out[a, b, k_a - 1, B] = rb[b][B] - sum((out[a, b, A, B] for A in range(k_a - 1)), Fraction(0))
    return Phenomenon(p.scenario, out)


def uniform_phenomenon(scenario: Scenario, exact: bool = True) -> Phenomenon:
    k = scenario.outcomes_a * scenario.outcomes_b
    if exact:
        t = np.full(scenario.shape, Fraction(1, k), dtype=object)
    else:
        t = np.full(scenario.shape, 1.0 / k)
    return Phenomenon(scenario, t)


def pr_box() -> Phenomenon:
    """Two-setting, two-outcome box with A*B = (-1)^(a*b) and uniform marginals."""
    scen = Scenario(2, 2, 2, 2, context="pr-box")
    t = np.empty(scen.shape, dtype=object)
    for a, b, A, B in product(range(2), repeat=4):
        prod = PLUS_MINUS[A] * PLUS_MINUS[B]
        t[a, b, A, B] = Fraction(1, 2) if prod == (-1) ** (a * b) else Fraction(0)
    return Phenomenon(scen, t)


def as_rational(p: Phenomenon) -> Phenomenon:
    """Exact binary value of each float entry (no rounding)."""
    return p if p.exact else Phenomenon(p.scenario, to_rational(p.table))
