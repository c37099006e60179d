from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from bellcheck import generators as gen
from bellcheck.errors import NotFactorizable, NumericallyAmbiguous, ScenarioTooLarge
from bellcheck.lhv import (
    CAP_ENV,
    BellCertificate,
    DeterministicStrategy,
    LhvModel,
    chsh_certificate,
    determinize,
    enumerate_strategies,
    local_bound,
    model_from_theory,
    solve_lhv,
    strategy_count,
    theory_from_model,
    verify_certificate,
    verify_model,
)
from bellcheck.quantum import born_phenomenon, chsh_optimal_settings, singlet, werner
from bellcheck.scenario import Scenario, chsh_value, pr_box, rationalize, uniform_phenomenon
from bellcheck.theory import Theory, classify, predict, reproduces

from conftest import CHSH

seeds = st.integers(0, 2**32 - 1)


def singlet_chsh(exact=False):
    a, b = chsh_optimal_settings()
    p = born_phenomenon(singlet(), a, b)
    return rationalize(p) if exact else p


def oracle_feasible(p):
    """scipy's LP over the same strategy columns, built independently."""
    s = p.scenario
    cols = []
    for alpha in product(range(s.outcomes_a), repeat=s.settings_a):
        for beta in product(range(s.outcomes_b), repeat=s.settings_b):
            v = np.zeros(s.shape)
            for a, b in product(range(s.settings_a), range(s.settings_b)):
                v[a, b, alpha[a], beta[b]] = 1
            cols.append(v.ravel())
    A = np.column_stack(cols)
    A = np.vstack([A, np.ones(A.shape[1])])
    rhs = np.append(p.to_float().table.ravel(), 1.0)
    return linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=rhs, bounds=[(0, None)] * A.shape[1],
                   method="highs").status == 0


@pytest.mark.parametrize("m, expected", [(2, 16), (1, 4), (3, 64)])
def test_strategy_counts(m, expected):
    s = Scenario(m, m, 2, 2)
    assert strategy_count(s) == expected
    strategies = enumerate_strategies(s)
    assert len(strategies) == expected == len(set(strategies))
    assert strategies == sorted(strategies)


def test_cap(monkeypatch):
    with pytest.raises(ScenarioTooLarge):
        enumerate_strategies(Scenario(3, 3, 3, 3), cap=500)
    monkeypatch.setenv(CAP_ENV, "10")
    with pytest.raises(ScenarioTooLarge):
        enumerate_strategies(CHSH)


def test_deterministic_local_phenomenon_is_vertex():
    st_ = DeterministicStrategy((0, 1), (1, 1))
    p = uniform_phenomenon(CHSH).__class__(CHSH, st_.table(CHSH))
    m = solve_lhv(p)
    assert isinstance(m, LhvModel)
    assert verify_model(m, p, 0).holds
    assert m.strategies == (st_,) and m.weights[0] == 1


def test_singlet_float_certificate():
    p = singlet_chsh()
    c = solve_lhv(p)
    assert isinstance(c, BellCertificate)
    assert c.name == "CHSH"
    assert c.local_bound == pytest.approx(2, abs=1e-12)
    assert c.phenomenon_value == pytest.approx(2 * np.sqrt(2), abs=1e-9)
    assert verify_certificate(c, p).holds


def test_singlet_exact_certificate():
    c = solve_lhv(singlet_chsh(exact=True))
    assert c.exact and c.local_bound == 2
    assert c.gap > Fraction(4, 5)


def test_unnamed_certificate_verifies():
    for p in (singlet_chsh(), singlet_chsh(exact=True), pr_box()):
        c = solve_lhv(p, named=False)
        assert c.name is None
        assert max(abs(x) for x in c.coefficients.flat) == 1
        assert verify_certificate(c, p).holds


@pytest.mark.parametrize("v, local", [(0.70, True), (0.72, False)])
def test_werner_either_side(v, local):
    a, b = chsh_optimal_settings()
    p = born_phenomenon(werner(v), a, b)
    assert isinstance(solve_lhv(p), LhvModel) == local
    assert isinstance(solve_lhv(rationalize(p)), LhvModel) == local


def test_werner_just_outside_is_ambiguous_in_float():
    a, b = chsh_optimal_settings()
    p = born_phenomenon(werner(1 / np.sqrt(2) + 1e-10), a, b)
    with pytest.raises(NumericallyAmbiguous):
        solve_lhv(p)
    assert isinstance(solve_lhv(rationalize(p, 10**15)), BellCertificate)


def test_perturbed_model_rejected():
    m = solve_lhv(uniform_phenomenon(CHSH))
    w = m.weights.copy()
    w[0] += Fraction(1, 10)
    assert not verify_model(LhvModel(CHSH, m.strategies, w), uniform_phenomenon(CHSH)).holds


def test_uniform_strategy_mixture_is_uniform():
    strategies = enumerate_strategies(CHSH)
    m = LhvModel(CHSH, strategies, np.array([Fraction(1, 16)] * 16, dtype=object))
    check = verify_model(m, uniform_phenomenon(CHSH), 0)
    assert check.holds and check.deviation == 0


def test_chsh_certificate_bound_and_zero_functional():
    c = chsh_certificate(singlet_chsh(exact=True))
    assert local_bound(c.coefficients, CHSH) == 2
    zero = BellCertificate(CHSH, np.full(CHSH.shape, Fraction(0), dtype=object), Fraction(0), Fraction(0))
    check = verify_certificate(zero, uniform_phenomenon(CHSH))
    assert check.local_bound == 0 and check.phenomenon_value == 0 and not check.holds


def test_tampered_certificate_fields_rejected():
    p = singlet_chsh(exact=True)
    c = solve_lhv(p)
    fake = BellCertificate(CHSH, c.coefficients, Fraction(1), c.phenomenon_value, c.name, c.settings)
    check = verify_certificate(fake, p)
    assert not check.fields_match and not check.holds


def test_boxes_two_strategies():
    from bellcheck.quantum import boxes_phenomenon
    m = solve_lhv(boxes_phenomenon())
    assert sorted(m.weights) == [Fraction(1, 2), Fraction(1, 2)]
    assert {(s.alpha, s.beta) for s in m.strategies} == {((0,), (1,)), ((1,), (0,))}


@given(seeds)
def test_lp_agrees_with_scipy_on_random_phenomena(seed):
    rng = np.random.default_rng(seed)
    s = Scenario(2, 2, 2, 2)
    # mixtures of a local and a PR-box part straddle the local polytope
    t = gen.factorizable_theory(rng, s, 2)
    w = Fraction(int(rng.integers(0, 9)), 8)
    p = predict(t)
    q = p.__class__(s, (1 - w) * p.table + w * pr_box().table)
    res = solve_lhv(q)
    if isinstance(res, LhvModel):
        assert verify_model(res, q, 0).holds
    else:
        assert verify_certificate(res, q).holds
    if abs(chsh_value(q)) != 2:  # stay off the CHSH facets for the float oracle
        assert isinstance(res, LhvModel) == oracle_feasible(q)


# Fine's construction ------------------------------------------------------------

def test_determinize_rejects_nonfactorizable():
    a, b = chsh_optimal_settings()
    from bellcheck.quantum import singlet_oqm_theory
    with pytest.raises(NotFactorizable):
        determinize(singlet_oqm_theory(a, b))


def test_determinize_deterministic_input_is_fixed_point():
    t = gen.deterministic_theory(np.random.default_rng(5), CHSH, 2, local=True)
    d = determinize(t)
    assert reproduces(d, predict(t), 0).holds
    assert sum(1 for w in d.mu if w > 0) <= 2


def test_determinize_uniform_product_is_uniform_mixture():
    k = np.full(CHSH.shape, Fraction(1, 4), dtype=object)
    d = determinize(Theory(CHSH, ["u"], np.array([Fraction(1)], dtype=object), k[None]))
    assert len(d.mu) == 16 and set(d.mu) == {Fraction(1, 16)}


@given(seeds)
def test_determinize_postconditions(seed):
    rng = np.random.default_rng(seed)
    t = gen.factorizable_theory(rng, gen.random_scenario(rng, 2, 2), int(rng.integers(1, 4)))
    d = determinize(t)
    assert all(classify(d).flags())
    assert reproduces(d, predict(t), 0).holds
    m = model_from_theory(d)
    assert verify_model(m, predict(t), 0).holds
    assert reproduces(theory_from_model(m), predict(t), 0).holds
