import os
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bellcheck.scenario import Phenomenon, Scenario

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CHSH = Scenario(2, 2, 2, 2)


def block_table(scenario, block):
    """Same (A, B) block at every setting pair."""
    t = np.empty(scenario.shape, dtype=object)
    for a, b in product(range(scenario.settings_a), range(scenario.settings_b)):
        t[a, b] = np.array(block, dtype=object)
    return Phenomenon(scenario, t)


@pytest.fixture
def anticorrelated():
    half = Fraction(1, 2)
    return block_table(CHSH, [[0, half], [half, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
