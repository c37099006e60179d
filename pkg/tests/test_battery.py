import json

import pytest

from bellcheck.battery import ITEMS, BatteryConfig, run_item, run_theorem_battery

SMALL = dict(n_fine=10, n_jarrett=60, n_determinism=60, n_predictability=15, n_jcfl=60)


def verdicts(report):
    return {k: v["verdict"] for k, v in report["items"].items()}


def test_default_battery_passes():
    report = run_theorem_battery()
    assert report["passed"], json.dumps(report["items"], indent=1)[:2000]
    assert set(report["items"]) == {n for n, _ in ITEMS}
    assert report["items"]["bell"]["gap"] > 0.8


def test_rational_battery_same_verdicts():
    f = run_theorem_battery(BatteryConfig(**SMALL))
    r = run_theorem_battery(BatteryConfig(encoding="rational", **SMALL))
    assert verdicts(f) == verdicts(r)
    assert r["tolerance"] == "0/1"
    assert r["items"]["bell"]["local_bound"] == "2/1"


def test_fault_injection_hits_fine_only():
    report = run_theorem_battery(BatteryConfig(corrupt_determinize=True, **SMALL))
    v = verdicts(report)
    assert v.pop("fine") == "fail"
    assert set(v.values()) == {"pass"}
    assert report["items"]["fine"]["witnesses"]


def test_deterministic_given_seed():
    a = json.dumps(run_theorem_battery(BatteryConfig(seed=7, **SMALL)))
    b = json.dumps(run_theorem_battery(BatteryConfig(seed=7, **SMALL)))
    assert a == b


def test_items_record_their_seed():
    item = run_item("jarrett", BatteryConfig(seed=3, **SMALL))
    assert item["seed"] == [3, 2]
    assert item["instances"] == SMALL["n_jarrett"]


def test_config_validated():
    with pytest.raises(ValueError):
        BatteryConfig(encoding="decimal")
    with pytest.raises(ValueError):
        BatteryConfig(tol=-1.0)
