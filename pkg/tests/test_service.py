import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from flowcap.scenario import generate_x_instance, to_dict
from flowcap.service import create_app


@pytest.fixture()
def client():
    app = create_app(generate_x_instance())
    with TestClient(app) as c:
        yield c


def wait_run(client, run_id, timeout=120.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        st = client.get(f"/runs/{run_id}").json()
        if st["status"] in ("done", "failed"):
            return st
        time.sleep(0.1)
    raise TimeoutError(f"run {run_id} did not finish")


def small_run(client, seed=1):
    r = client.post("/optimize", json={"seed": seed, "population": 12, "generations": 4})
    assert r.status_code == 200
    body = r.json()
    assert body["status"] in ("queued", "running")
    st = wait_run(client, body["run_id"])
    assert st["status"] == "done", st.get("error")
    return st


def test_scenario_roundtrip(client):
    r = client.get("/scenario").json()
    assert r["scenario"]["name"] == "x-instance"
    v0 = r["version"]
    r2 = client.post("/scenario", json=r["scenario"]).json()
    assert r2["version"] == v0


def test_bad_scenario_rejected(client):
    assert client.post("/scenario", json={"version": 42}).status_code == 422


def test_disruption_updates_alarms_and_version(client):
    v0 = client.get("/scenario").json()["version"]
    before = client.get("/occupancy").json()
    r = client.post(
        "/disruption", json={"sector_id": "C", "from_min": 30, "to_min": 90, "capacity": 1}
    ).json()
    assert r["version"] != v0
    after = client.get("/occupancy").json()
    assert after["costs"]["c2"] > before["costs"]["c2"]
    assert any(a["sector_id"] == "C" and a["capacity"] == 1.0 for a in after["alarms"])


def test_disruption_validation(client):
    r = client.post(
        "/disruption", json={"sector_id": "nope", "from_min": 30, "to_min": 90, "capacity": 1}
    )
    assert r.status_code == 422


def test_occupancy_window_and_unknown_sector(client):
    r = client.get("/occupancy", params={"sector": "C", "from_bin": 40, "to_bin": 60}).json()
    assert r["from_bin"] == 40 and r["to_bin"] == 60
    assert len(r["sectors"]["C"]["expected"]) == 20
    assert client.get("/occupancy", params={"sector": "zz"}).status_code == 404


def test_run_lifecycle_and_suggestion(client):
    st = small_run(client)
    assert st["archive"]
    assert len(st["hypervolume_trace"]) == st["generations"]
    trace = np.array(st["hypervolume_trace"])
    assert np.all(np.diff(trace) >= -1e-12)
    sug = client.get(f"/runs/{st['run_id']}/suggestion").json()
    assert sug["heuristic"] is True
    assert st["archive"][sug["index"]] == sug["solution"]


def test_unknown_run_404(client):
    assert client.get("/runs/deadbeef").status_code == 404


def test_commit_roundtrip_bit_exact(client):
    st = small_run(client)
    version = client.get("/scenario").json()["version"]
    idx = max(range(len(st["archive"])), key=lambda i: st["archive"][i]["c1"])  # any member
    r = client.post(
        "/commit", json={"run_id": st["run_id"], "index": idx, "scenario_version": version}
    ).json()
    assert r["costs"]["c1"] == st["archive"][idx]["c1"]
    assert r["costs"]["c2"] == st["archive"][idx]["c2"]
    occ = client.get("/occupancy").json()
    assert occ["costs"] == r["costs"]


def test_commit_stale_version_409(client):
    st = small_run(client)
    client.post(
        "/disruption", json={"sector_id": "C", "from_min": 30, "to_min": 90, "capacity": 2}
    )
    version = client.get("/scenario").json()["version"]
    r = client.post(
        "/commit", json={"run_id": st["run_id"], "index": 0, "scenario_version": version}
    )
    assert r.status_code == 409


def test_commit_index_out_of_range(client):
    st = small_run(client)
    version = client.get("/scenario").json()["version"]
    r = client.post(
        "/commit", json={"run_id": st["run_id"], "index": 999, "scenario_version": version}
    )
    assert r.status_code == 422


def test_flight_marginals(client):
    r = client.get("/flights/F00/marginals").json()
    assert r["flight_id"] == "F00"
    assert len(r["waypoints"]) == 6
    for w in r["waypoints"]:
        assert abs(sum(w["mass"]) - 1.0) < 1e-9
    assert client.get("/flights/ZZZ/marginals").status_code == 404
