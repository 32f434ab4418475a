from pathlib import Path

import pytest

import loramesh

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def test_airtime_reference_frame():
    assert loramesh.airtime(20) == pytest.approx(0.014144, rel=1e-12)
    assert loramesh.airtime(20, spreading_factor=12, bandwidth_hz=125_000) > 1.0


def test_distance_round_trip():
    prx = loramesh.received_power(123.4, exponent=3.1)
    assert loramesh.estimate_distance(prx, exponent=3.1) == pytest.approx(123.4, rel=1e-9)


def test_trigger_rules():
    assert loramesh.case1_triggers(40, 55, 52)
    assert not loramesh.case1_triggers(40, 49, 52)
    assert loramesh.case2_triggers(30, 45)
    assert not loramesh.case2_triggers(35, 45)


def test_simulate_is_deterministic():
    path = SCENARIOS / "representative_routing.json"
    a = loramesh.simulate(path, seed=2, packets=300)
    b = loramesh.simulate(path, seed=2, packets=300)
    assert a["trace_digest"] == b["trace_digest"]
    m = a["metrics"]
    assert m["generated"] == 300
    assert m["delivered"] + m["losses"]["initial_ed"] + m["losses"]["intermediate"] == 300
    assert m["pdr"] > 0.8


def test_standby_recovery_with_trace():
    out = loramesh.simulate(SCENARIOS / "standby_recovery.json", with_trace=True)
    assert out["metrics"]["delivered"] == 1
    assert any(e["kind"] == "StandbyFired" for e in out["trace"])


def test_plan_from_shipped_reports():
    import json

    reports = json.loads((SCENARIOS / "representative_reports.json").read_text())
    rows = {r["uid"]: r for r in loramesh.plan(reports)["rows"]}
    assert rows[13]["upstream"] == 11
    assert rows[8]["upstream"] == 15


def test_config_errors_raise():
    with pytest.raises(loramesh.ConfigError):
        loramesh.simulate(SCENARIOS / "missing.json")
    with pytest.raises(ValueError):
        loramesh.simulate(SCENARIOS / "representative_routing.json", protocol="gossip")


def test_compare_and_loadtest():
    path = SCENARIOS / "representative_routing.json"
    summary = loramesh.compare(path, seeds=[1], packets=200, jobs=1)
    assert summary["pdr"]["routing"]["mean"] > summary["pdr"]["flooding"]["mean"]
    rep = loramesh.loadtest(path, intervals=[2.0, 1.0], budgets=[100, 200], jobs=1)
    assert len(rep["points"]) == 4
