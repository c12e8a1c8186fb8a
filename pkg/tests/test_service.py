import importlib.resources

import pytest
from fastapi.testclient import TestClient

from nextpm.config import ConfigError, load_config
from nextpm.service import create_app, state_dir_from_env

from conftest import SUMMER


@pytest.fixture(scope="module")
def config():
    path = importlib.resources.files("nextpm") / "fixtures" / "service_fast.json"
    return load_config(str(path))


@pytest.fixture()
def client(config, tmp_path):
    app = create_app(config, state_dir=tmp_path)
    return TestClient(app)


def test_state_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("NEXTPM_STATE_DIR", str(tmp_path / "x"))
    assert state_dir_from_env() == tmp_path / "x"
    assert state_dir_from_env(tmp_path / "y") == tmp_path / "y"


def test_get_plan_table2(client):
    plan = client.get("/plan").json()
    assert plan["tau"] == 50
    assert plan["set_P"] == [1, 2, 3, 4]
    assert plan["mc"] == {"replications": 8000, "seed": 0}
    assert len(plan["summary"]) == 4
    assert plan["objective"] == pytest.approx(4.96, abs=0.05)


def test_state_and_history_fresh(client):
    state = client.get("/state").json()
    assert state["s"] == 0 and state["r"] == 80
    assert client.get("/history").json()["events"] == []


def test_failure_flow_and_idempotency(client):
    body = {"component": 3, "time": 12.4, "request_id": "r1"}
    first = client.post("/failure", json=body)
    assert first.status_code == 200
    j = first.json()
    assert j["event"]["time"] == 13
    assert j["event"]["cm_component"] == 3
    assert j["state"]["s"] == 13
    assert j["plan"]["tau"] > 13           # rescheduled plan comes back
    replay = client.post("/failure", json=body)
    assert replay.json() == j
    assert len(client.get("/history").json()["events"]) == 1


def test_failure_validation(client):
    r = client.post("/failure", json={"component": 9, "time": 12.4,
                                      "request_id": "x"})
    assert r.status_code == 404
    r = client.post("/failure", json={"component": 1, "time": 99.0,
                                      "request_id": "y"})
    assert r.status_code == 422            # beyond the current plan's tau
    r = client.post("/failure", json={"component": 1, "time": 0.0,
                                      "request_id": "z"})
    assert r.status_code == 422


def test_stale_config_hash_conflict(client):
    r = client.post("/failure", json={"component": 1, "time": 12.0,
                                      "request_id": "h", "config_hash": "old"})
    assert r.status_code == 409


def test_maintenance_updates_state(client):
    r = client.post("/maintenance", json={"components": [1, 2], "time": 30,
                                          "request_id": "m"})
    assert r.status_code == 200
    state = r.json()["state"]
    assert state["s"] == 30
    assert state["last_maintenance"] == {"1": 30, "2": 30, "3": 0, "4": 0}
    r = client.post("/maintenance", json={"components": [7], "time": 40,
                                          "request_id": "m2"})
    assert r.status_code == 404


def test_whatif_summer_calendar_no_mutation(client):
    before = client.get("/state").json()
    r = client.post("/whatif", json={"calendar": {"pattern": list(SUMMER)}})
    assert r.status_code == 200
    j = r.json()
    assert j["plan"]["tau"] != j["baseline"]["tau"] or \
        j["plan"]["objective"] != j["baseline"]["objective"]
    # near the paper's summer-start plan (48, {1,3}); MC noise allows +-2
    assert abs(j["plan"]["tau"] - 48) <= 2
    assert 3 in j["plan"]["set_P"]
    assert client.get("/state").json() == before


def test_whatif_lambda_override(client):
    r = client.post("/whatif", json={"lambda": 1.0})
    assert r.status_code == 200
    r = client.post("/whatif", json={"lambda": -2.0})
    assert r.status_code == 422


def test_persistence_round_trip(config, tmp_path):
    app = create_app(config, state_dir=tmp_path)
    c = TestClient(app)
    c.post("/failure", json={"component": 3, "time": 12.4, "request_id": "p"})
    reopened = TestClient(create_app(config, state_dir=tmp_path))
    assert reopened.get("/state").json()["s"] == 13
    assert len(reopened.get("/history").json()["events"]) == 1
    # replaying the recorded request against the reloaded store is a no-op
    reopened.post("/failure", json={"component": 3, "time": 12.4,
                                    "request_id": "p"})
    assert len(reopened.get("/history").json()["events"]) == 1


def test_state_from_other_config_rejected(config, tmp_path):
    from nextpm.config import config_from_dict
    create_app(config, state_dir=tmp_path)          # writes state.json
    other = config_from_dict({**config.to_dict(), "lambda": 2.0})
    with pytest.raises(ConfigError):
        create_app(other, state_dir=tmp_path)
    create_app(other, state_dir=tmp_path, reset=True)   # reset clears it
