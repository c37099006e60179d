from fractions import Fraction

import numpy as np

from bellcheck.lhv import LhvModel, solve_lhv
from bellcheck.scenario import chsh_value, is_signal_local, validate_phenomenon
from bellcheck.werner import werner_family, werner_threshold


def test_family_is_exact_and_valid():
    table = werner_family()
    p = table(Fraction(7, 10))
    assert p.exact and validate_phenomenon(p) == [] and is_signal_local(p, 0).holds
    assert abs(chsh_value(p)) == Fraction(7, 10) * abs(chsh_value(table(1)))


def test_either_side_of_threshold():
    table = werner_family()
    assert isinstance(solve_lhv(table(Fraction(70, 100))), LhvModel)
    assert not isinstance(solve_lhv(table(Fraction(72, 100))), LhvModel)


def test_bisection_bracket():
    res = werner_threshold(Fraction(1, 10**4))
    assert res.hi - res.lo <= Fraction(1, 10**4)
    assert res.lo <= 1 / np.sqrt(2) <= res.hi
    assert all(local == (v <= res.lo) for v, local in res.probes)
