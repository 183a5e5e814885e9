import math

import pytest
from fastapi.testclient import TestClient

from mcis.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_classify_endpoint(client):
    resp = client.post("/classify", json={"n": 10**6, "C_A": 4, "H": 5})
    assert resp.status_code == 200
    data = resp.json()
    assert (data["case"], data["sub_case"]) == (1, 1)
    assert data["condition"] == "interface-bottleneck"
    assert data["label"] == "InterfaceBottleneck"
    assert data["thresholds"]["F1"] == pytest.approx(13.81551, rel=1e-5)


def test_classify_domain_error(client):
    resp = client.post("/classify", json={"n": 3, "C_A": 1, "H": 1})
    assert resp.status_code == 422
    assert "nested log" in resp.json()["detail"]


def test_bounds_endpoint(client):
    cfg = dict(n=10**6, b=4, C=6, C_A=4, C_I=2, m=2, W=5.0, W_A=1.0, W_I=2.0, H=50)
    resp = client.post("/bounds", json=cfg)
    assert resp.status_code == 200
    data = resp.json()
    assert data["condition"] == "connectivity"
    assert data["lambda_a"] == pytest.approx(1.047843e-2, rel=1e-5)
    assert data["T_A"] == pytest.approx(361.9121, rel=1e-5)


def test_bounds_invalid_config(client):
    resp = client.post("/bounds", json={"n": 100, "C": 6, "C_A": 4, "C_I": 3})
    assert resp.status_code == 400
    assert "channel split" in resp.json()["detail"]


def test_topology_endpoint(client):
    cfg = dict(n=50, b=4, C=2, C_A=1, C_I=1, m=2, W=2.0, W_A=1.0, W_I=0.5, H=2, seed=3)
    resp = client.post("/topology", json=cfg)
    assert resp.status_code == 200
    data = resp.json()
    rows = data["rows"]
    assert len(rows) == 50 + 4
    kinds = {r["kind"] for r in rows}
    assert kinds == {"node", "bs"}
    bs_rows = [r for r in rows if r["kind"] == "bs"]
    assert {(r["x"], r["y"]) for r in bs_rows} == {
        (0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)
    }
    assert all(0 <= r["bscell"] < 4 for r in rows)


def test_simulate_endpoint_deterministic(client):
    cfg = dict(n=300, b=4, C=6, C_A=4, C_I=2, m=2, W=10.0, W_A=6.0, W_I=2.0, H=2, seed=11)
    r1 = client.post("/simulate", json={"config": cfg, "trial": 0})
    r2 = client.post("/simulate", json={"config": cfg, "trial": 0})
    assert r1.status_code == 200
    assert r1.json() == r2.json()
    row = r1.json()
    assert row["feasible"] is True
    assert row["n"] == 300
    assert row["lambda_min"] > 0


def test_sweep_endpoint(client):
    cfg = dict(n=128, b=1, C=1, C_A=1, C_I=0, m=0, W=1.0, W_A=1.0, W_I=0.0, H=2, seed=0)
    req = {"config": cfg, "vary": [["n", [128, 256]]], "seeds": [0, 1], "workers": 1}
    resp = client.post("/sweep", json=req)
    assert resp.status_code == 200
    data = resp.json()
    assert len(data["rows"]) == 4
    assert data["failures"] == []
    assert [r["n"] for r in data["rows"]] == [128, 128, 256, 256]
    assert all(isinstance(r["n"], int) for r in data["rows"])


def test_sweep_preset_recomputes_hops(client):
    cfg = dict(n=128, b=1, C=1, C_A=1, C_I=0, m=0, W=1.0, W_A=1.0, W_I=0.0, H=2, seed=0)
    req = {"config": cfg, "vary": [["n", [4096]]], "seeds": [0], "preset": "scah"}
    resp = client.post("/sweep", json=req)
    assert resp.status_code == 200
    row = resp.json()["rows"][0]
    assert row["H"] == math.ceil(math.sqrt(4096 / math.log(4096)))


def test_sweep_rejects_unknown_parameter(client):
    cfg = dict(n=128, b=1, C=1, C_A=1, C_I=0, m=0, W=1.0, W_A=1.0, W_I=0.0, H=2)
    resp = client.post("/sweep", json={"config": cfg, "vary": [["bogus", [1]]], "seeds": [0]})
    assert resp.status_code == 422


def test_fit_endpoint(client):
    pts = [[10, 10**-0.5], [100, 100**-0.5], [1000, 1000**-0.5]]
    resp = client.post("/fit", json={"points": pts})
    assert resp.status_code == 200
    assert resp.json()["slope"] == pytest.approx(-0.5, abs=1e-12)


def test_fit_rejects_bad_points(client):
    resp = client.post("/fit", json={"points": [[1, 1], [2, 2]]})
    assert resp.status_code == 422


def test_verify_endpoint_subset(client):
    resp = client.post("/verify", json={"criteria": [1, 10]})
    assert resp.status_code == 200
    data = resp.json()
    assert [r["number"] for r in data["results"]] == [1, 10]
    assert data["all_passed"] is True
