"""Completeness criteria as executable checks.

A quantity measured by Bob's setting ``b`` is an element of reality when
some remote setting ``a`` makes its outcome predictable (the remote
measurement is taken never to disturb Bob's system). It is represented in a
theory when its outcome is fixed by ``(b, lambda)`` alone. A theory is
complete in this sense when every element of reality is represented.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import PreconditionsNotMet, ShapeError
from .numerics import extreme_value
from .scenario import Phenomenon, is_predictable
from .theory import (
    STRONG,
    Theory,
    is_factorizable,
    is_fragile_local,
    is_jarrett_complete,
    predict,
    reproduces,
)


def disturbs(a: int) -> bool:
    """A remote measurement never disturbs Bob's system (space-like separation)."""
    return False


@dataclass(frozen=True)
class RepCheck:
    holds: bool
    witness: dict | None = None

    def __bool__(self):
        return self.holds


def rep_in_theory(t: Theory, b: int, tol=None) -> RepCheck:
    """Bob's outcome at ``b`` is a function of lambda alone: every P(B|a,b,l)
    is 0 or 1 and the same for all of Alice's settings."""
    tol = t.tolerance if tol is None else tol
    mb = t.marginal_b()
    for lam in t.support(tol):
        for B in range(t.scenario.outcomes_b):
            vals = [mb[lam, a, b, B] for a in range(t.scenario.settings_a)]
            ext = [extreme_value(v, tol) for v in vals]
            if any(e is None for e in ext):
                a = ext.index(None)
                return RepCheck(False, {"lambda": lam, "a": a, "b": b, "B": B,
                                        "reason": "not extreme", "P": vals[a]})
            if len(set(ext)) > 1:
                return RepCheck(False, {"lambda": lam, "b": b, "B": B,
                                        "reason": "depends on a", "P": vals})
    return RepCheck(True)


@dataclass(frozen=True)
class EprElement:
    holds: bool
    witness_a: int | None = None

    def __bool__(self):
        return self.holds


def epr_element(p: Phenomenon, b: int, tol=None) -> EprElement:
    """Some remote setting ``a`` lets Alice's outcome predict Bob's outcome at ``b``."""
    for a in range(p.scenario.settings_a):
        if not disturbs(a) and is_predictable(p, a, b, tol, direction="bob"):
            return EprElement(True, a)
    return EprElement(False)


@dataclass
class ChainStep:
    b: int
    antecedent: bool
    witness_a: int | None
    checked: bool
    consequent: bool | None
    witness: dict | None = None


@dataclass
class EprReport:
    predictable: dict = field(default_factory=dict)  # (a, b) -> bool
    represented: dict = field(default_factory=dict)  # b -> bool
    chain: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return not any(step.checked for step in self.chain)

    @property
    def passed(self) -> bool:
        return all(step.consequent for step in self.chain if step.checked)

    def failures(self) -> list[ChainStep]:
        return [step for step in self.chain if step.checked and not step.consequent]


def check_completeness_implication(t: Theory, p: Phenomenon, tol=None) -> EprReport:
    """For every Bob quantity that is an element of reality, check that the
    theory represents it. A failure shows the theory is not complete."""
    tol = t.tolerance if tol is None else tol
    rep = reproduces(t, p, tol)
    if not rep.holds:
        raise ShapeError(f"theory does not reproduce the phenomenon (deviation {rep.deviation})")
    s = p.scenario
    report = EprReport()
    for a, b in product(range(s.settings_a), range(s.settings_b)):
        report.predictable[(a, b)] = is_predictable(p, a, b, tol)
    for b in range(s.settings_b):
        rc = rep_in_theory(t, b, tol)
        report.represented[b] = rc.holds
        el = epr_element(p, b, tol)
        if el.holds:
            report.chain.append(ChainStep(b, True, el.witness_a, True, rc.holds, rc.witness))
        else:
            report.chain.append(ChainStep(b, False, None, False, None))
    return report


@dataclass
class JcflCheck:
    holds: bool
    checked: int
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def check_jcfl_implies_rep(t: Theory, p: Phenomenon, tol=None) -> JcflCheck:
    """Wherever the phenomenon makes B certain given (A, a, b), every lambda
    compatible with A must fix B through an a-independent extreme P(B|b,l).

    Requires the theory to be Jarrett-complete and (strongly) fragile-local
    and to reproduce ``p``.
    """
    tol = t.tolerance if tol is None else tol
    jc, fl = is_jarrett_complete(t, tol), is_fragile_local(t, tol, STRONG)
    if not (jc.holds and fl.holds):
        raise PreconditionsNotMet(f"needs JC and FL (JC {jc.status.value}, FL {fl.status.value})")
    if not reproduces(t, p, tol).holds:
        raise PreconditionsNotMet("theory does not reproduce the phenomenon")
    s = p.scenario
    ma, mb = t.marginal_a(), t.marginal_b()
    checked, witnesses = 0, []
    for a, b in product(range(s.settings_a), range(s.settings_b)):
        block = p.table[a, b]
        for A in range(s.outcomes_a):
            mass = block[A].sum()
            if mass <= tol:
                continue
            for B in range(s.outcomes_b):
                if extreme_value(block[A, B] / mass, tol) is None:
                    continue
                for lam in t.support(tol):
                    if ma[lam, a, b, A] <= tol:
                        continue
                    checked += 1
                    vals = [mb[lam, a2, b, B] for a2 in range(s.settings_a)]
                    ext = {extreme_value(v, tol) for v in vals}
                    if None in ext or len(ext) > 1:
                        witnesses.append({"A": A, "a": a, "B": B, "b": b, "lambda": lam,
                                          "P(B|a',b,lambda)": vals})
    return JcflCheck(not witnesses, checked, witnesses)


@dataclass
class PredictabilityCheck:
    holds: bool
    pairs: list
    witnesses: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return not self.pairs

    def __bool__(self):
        return self.holds


def check_lc_predictability(t: Theory, tol=None) -> PredictabilityCheck:
    """Factorizable theory + predictable outcome => that outcome is
    predetermined by lambda.

    For every (a, b) and direction where the predicted table makes one
    party's outcome a function of the other's, the predicted party's local
    marginal must be 0/1 for every lambda that occurs. When both directions
    hold, every kernel entry at (a, b) is therefore 0 or 1.
    """
    tol = t.tolerance if tol is None else tol
    if not is_factorizable(t, tol).holds:
        raise PreconditionsNotMet("theory is not factorizable")
    p = predict(t)
    s = t.scenario
    ma, mb = t.marginal_a(), t.marginal_b()
    pairs, witnesses = [], []
    for a, b in product(range(s.settings_a), range(s.settings_b)):
        for direction, marg, n in (("bob", mb, s.outcomes_b), ("alice", ma, s.outcomes_a)):
            if not is_predictable(p, a, b, tol, direction):
                continue
            pairs.append((a, b, direction))
            for lam in t.support(tol):
                bad = [o for o in range(n) if extreme_value(marg[lam, a, b, o], tol) is None]
                if bad:
                    witnesses.append({"a": a, "b": b, "direction": direction, "lambda": lam,
                                      "outcome": bad[0]})
        if {"bob", "alice"} <= {d for x, y, d in pairs if (x, y) == (a, b)}:
            for lam in t.support(tol):
                if any(extreme_value(v, tol) is None for v in t.kernel[lam, a, b].flat):
                    witnesses.append({"a": a, "b": b, "direction": "both", "lambda": lam})
    return PredictabilityCheck(not witnesses, pairs, witnesses)
