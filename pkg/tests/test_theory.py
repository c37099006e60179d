from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellcheck import generators as gen
from bellcheck.errors import InvalidTheory, ShapeError
from bellcheck.quantum import (
    MeasurementSetting,
    born_phenomenon,
    chsh_optimal_settings,
    singlet,
    singlet_oqm_theory,
)
from bellcheck.scenario import Scenario, correlator, uniform_phenomenon
from bellcheck.theory import (
    STRONG,
    WEAK,
    Status,
    Theory,
    averaged_correlator,
    classify,
    is_deterministic,
    is_factorizable,
    is_fragile_local,
    is_jarrett_complete,
    is_local,
    predict,
    reproduces,
)

from conftest import CHSH

HALF = Fraction(1, 2)
seeds = st.integers(0, 2**32 - 1)


def point(scenario, A, B):
    k = np.full(scenario.shape, Fraction(0), dtype=object)
    k[:, :, A, B] = Fraction(1)
    return k


def theory(scenario, kernels, mu=None):
    n = len(kernels)
    mu = [Fraction(1, n)] * n if mu is None else mu
    return Theory(scenario, [f"l{i}" for i in range(n)], np.array(mu, dtype=object),
                  np.array(kernels, dtype=object))


# brute-force oracles, written straight from the definitions ----------------

def oracle_local(t, tol=1e-12):
    tf = t.to_float()
    ma, mb = tf.kernel.sum(axis=4), tf.kernel.sum(axis=3)  # [l,a,b,A], [l,a,b,B]
    for lam in range(len(t.lambdas)):
        if tf.mu[lam] <= tol:
            continue
        if np.ptp(ma[lam], axis=1).max() > tol or np.ptp(mb[lam], axis=0).max() > tol:
            return False
    return True


def oracle_jc(t, tol=1e-12):
    tf = t.to_float()
    for lam in range(len(t.lambdas)):
        if tf.mu[lam] <= tol:
            continue
        for a, b in product(range(t.scenario.settings_a), range(t.scenario.settings_b)):
            k = tf.kernel[lam, a, b]
            if np.abs(k - np.outer(k.sum(1), k.sum(0))).max() > tol:
                return False
    return True


# validation ------------------------------------------------------------------

def test_mu_must_be_distribution():
    with pytest.raises(InvalidTheory):
        theory(CHSH, [point(CHSH, 0, 0)], mu=[Fraction(1, 2)])


def test_kernel_must_be_normalized():
    k = point(CHSH, 0, 0)
    k[1, 1, 0, 1] = Fraction(1)
    with pytest.raises(InvalidTheory):
        theory(CHSH, [k])


def test_kernel_shape_checked():
    with pytest.raises(ShapeError):
        Theory(CHSH, ["x"], [1.0], np.ones((1, 2, 2, 2)))


# predict / reproduces --------------------------------------------------------

def test_single_lambda_prediction_is_kernel():
    k = point(CHSH, 1, 0)
    assert np.array_equal(predict(theory(CHSH, [k])).table, k)


def test_opposite_point_masses_mix_to_half():
    p = predict(theory(CHSH, [point(CHSH, 0, 1), point(CHSH, 1, 0)]))
    assert p.table[1, 0, 0, 1] == HALF and p.table[1, 0, 0, 0] == 0


def test_oqm_prediction_matches_born():
    a, b = chsh_optimal_settings()
    t = singlet_oqm_theory(a, b)
    assert reproduces(t, born_phenomenon(singlet(), a, b), 1e-9).holds


def test_plus_plus_vs_uniform_deviation():
    r = reproduces(theory(CHSH, [point(CHSH, 0, 0)]), uniform_phenomenon(CHSH), 0)
    assert not r.holds
    assert r.deviation == Fraction(3, 4)


def test_reproduces_shape_mismatch():
    with pytest.raises(ShapeError):
        reproduces(theory(CHSH, [point(CHSH, 0, 0)]), uniform_phenomenon(Scenario(1, 2, 2, 2)))


@given(seeds)
def test_theory_reproduces_itself(seed):
    t = gen.random_theory(np.random.default_rng(seed))
    assert reproduces(t, predict(t), 0).holds
    tf = t.to_float()
    assert reproduces(tf, predict(tf), 1e-12).holds


# individual properties -------------------------------------------------------

def test_zero_weight_lambda_ignored():
    noisy = np.full(CHSH.shape, Fraction(1, 4), dtype=object)
    t = theory(CHSH, [point(CHSH, 0, 0), noisy], mu=[Fraction(1), Fraction(0)])
    assert is_deterministic(t).status is Status.HOLDS


def test_oqm_singlet_not_deterministic():
    a, b = chsh_optimal_settings()
    r = is_deterministic(singlet_oqm_theory(a, b))
    assert r.status is Status.FAILS and r.witness is not None


def test_toy_nonlocal_fails_locality_with_witness():
    r = is_local(gen.nonlocal_toy_theory())
    assert r.status is Status.FAILS
    assert r.deviation == 1
    assert set(r.witness.where) >= {"a", "a'", "b", "B"}


def test_locality_vacuous_for_single_settings():
    s = Scenario(1, 1, 2, 2)
    assert is_local(theory(s, [point(s, 0, 0)])).status is Status.VACUOUS


def test_boxes_style_kernel_not_factorizable():
    s = Scenario(1, 1, 2, 2)
    k = np.array([[[[0, HALF], [HALF, 0]]]], dtype=object)
    r = is_factorizable(theory(s, [k]))
    assert r.status is Status.FAILS and r.deviation == Fraction(1, 4)


def test_product_kernel_is_jarrett_complete():
    q = [Fraction(1, 3), Fraction(2, 3)]
    k = np.empty(CHSH.shape, dtype=object)
    for a, b in product(range(2), range(2)):
        k[a, b] = [[x * y for y in q] for x in q]
    assert is_jarrett_complete(theory(CHSH, [k])).holds


def test_oqm_singlet_not_jarrett_complete():
    settings = [MeasurementSetting.from_angle(0)]
    assert is_jarrett_complete(singlet_oqm_theory(settings, settings)).status is Status.FAILS


def fragile_counterexample():
    # P(B=0|a=0,b,l) = 1 but P(B=0|a=1,b,l) = 1/2
    s = Scenario(2, 1, 2, 2)
    k = np.full(s.shape, Fraction(0), dtype=object)
    k[0, 0] = [[1, 0], [0, 0]]
    k[1, 0] = [[HALF, HALF], [0, 0]]
    return theory(s, [k])


def test_fragile_locality_strong_and_weak():
    t = fragile_counterexample()
    assert is_fragile_local(t, mode=STRONG).status is Status.FAILS
    assert is_fragile_local(t, mode=WEAK).holds
    assert not is_local(t).holds


def test_fragile_locality_vacuous_without_extremes():
    k = np.full(CHSH.shape, Fraction(1, 4), dtype=object)
    k[0, 1] = [[Fraction(1, 8), Fraction(3, 8)], [Fraction(3, 8), Fraction(1, 8)]]
    assert is_fragile_local(theory(CHSH, [k])).status is Status.VACUOUS


def test_fragile_mode_validated():
    with pytest.raises(ValueError):
        is_fragile_local(fragile_counterexample(), mode="medium")


# classification -----------------------------------------------------------------

def statuses(v):
    return tuple(r.status.value for r in v.as_dict().values())


def test_classify_oqm_singlet():
    a, b = chsh_optimal_settings()
    v = classify(singlet_oqm_theory(a, b), 1e-9)
    d, l_, f, jc, fl = statuses(v)
    assert (d, l_, f, jc) == ("fails", "holds", "fails", "fails")
    assert fl != "fails"


def test_classify_toy_nonlocal():
    assert statuses(classify(gen.nonlocal_toy_theory())) == ("holds", "fails", "fails", "holds", "fails")


def test_classify_same_in_both_encodings():
    t = gen.random_theory(np.random.default_rng(3), kind="local")
    assert classify(t).flags() == classify(t.to_float()).flags()


@given(seeds, st.sampled_from(gen.KINDS))
def test_checkers_agree_with_oracles(seed, kind):
    t = gen.random_theory(np.random.default_rng(seed), kind=kind)
    v = classify(t)  # also cross-checks F <=> L & JC, D => JC, L => FL
    assert v.local.holds == oracle_local(t)
    assert v.jarrett_complete.holds == oracle_jc(t)
    assert v.factorizable.holds == (oracle_local(t) and oracle_jc(t))


@given(seeds)
def test_properties_invariant_under_relabeling(seed):
    rng = np.random.default_rng(seed)
    t = gen.random_theory(rng)
    s = t.scenario
    perm_a = rng.permutation(s.settings_a)
    out_b = rng.permutation(s.outcomes_b)
    k = t.kernel[:, perm_a][:, :, :, :, out_b]
    u = Theory(s, t.lambdas, t.mu, k)
    assert classify(t).flags() == classify(u).flags()


@given(seeds)
def test_factorizable_generator_is_local_and_jc(seed):
    rng = np.random.default_rng(seed)
    t = gen.factorizable_theory(rng, gen.random_scenario(rng))
    assert statuses(classify(t))[2] == "holds"


# averaged correlator -----------------------------------------------------------

def test_deterministic_local_averages_are_signs():
    t = gen.deterministic_theory(np.random.default_rng(0), CHSH, 3, local=True)
    ac = averaged_correlator(t, 1, 0)
    assert ac.decomposed
    assert set(ac.abar) <= {-1, 1} and set(ac.bbar) <= {-1, 1}


def test_uniform_noise_averages_vanish():
    t = theory(CHSH, [np.full(CHSH.shape, Fraction(1, 4), dtype=object)])
    ac = averaged_correlator(t, 0, 1)
    assert ac.value == 0 and ac.abar == (0,) and ac.bbar == (0,)


def test_nonfactorizable_not_decomposed():
    a, b = chsh_optimal_settings()
    ac = averaged_correlator(singlet_oqm_theory(a, b), 0, 0)
    assert not ac.decomposed and ac.reason


@given(seeds)
def test_decomposition_matches_correlator(seed):
    rng = np.random.default_rng(seed)
    t = gen.factorizable_theory(rng, CHSH, 3).to_float()
    for a, b in product(range(2), range(2)):
        ac = averaged_correlator(t, a, b)
        total = sum(m * x * y for m, x, y in zip(t.mu, ac.abar, ac.bbar))
        assert total == pytest.approx(correlator(predict(t), a, b), abs=1e-12)
