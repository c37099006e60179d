"""Locating the local/nonlocal boundary of Werner phenomena by bisection."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lhv import LhvModel, solve_lhv
from .quantum import born_phenomenon, chsh_optimal_settings, singlet
from .scenario import Phenomenon, rationalize, uniform_phenomenon


def werner_family(a_settings=None, b_settings=None):
    """v -> exact table v * singlet + (1 - v) * uniform, for rational v.

    The singlet table is rationalized once, so every probe is an exact
    rational LP on an exactly signal-local table.
    """
    if a_settings is None:
        a_settings, b_settings = chsh_optimal_settings()
    s_table = rationalize(born_phenomenon(singlet(), a_settings, b_settings))
    u_table = uniform_phenomenon(s_table.scenario, exact=True)

    def table(v) -> Phenomenon:
        v = Fraction(v)
        return Phenomenon(s_table.scenario, v * s_table.table + (1 - v) * u_table.table)
    return table


@dataclass
class Bisection:
    lo: Fraction  # largest probe with an LHV model
    hi: Fraction  # smallest probe without one
    probes: list = field(default_factory=list)

    @property
    def estimate(self) -> Fraction:
        return (self.lo + self.hi) / 2


def werner_threshold(width=Fraction(1, 10**7), a_settings=None, b_settings=None) -> Bisection:
    """Bisect v in [0, 1] until the bracket is narrower than ``width``."""
    family = werner_family(a_settings, b_settings)
    lo, hi = Fraction(0), Fraction(1)
    if not isinstance(solve_lhv(family(lo)), LhvModel) or isinstance(solve_lhv(family(hi)), LhvModel):
        raise ValueError("no sign change of LHV feasibility on [0, 1]")
    out = Bisection(lo, hi)
    while out.hi - out.lo > width:
        mid = (out.lo + out.hi) / 2
        local = isinstance(solve_lhv(family(mid)), LhvModel)
        out.probes.append((mid, local))
        if local:
            out.lo = mid
        else:
            out.hi = mid
    return out
