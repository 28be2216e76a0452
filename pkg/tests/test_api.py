import pytest
from fastapi.testclient import TestClient

from src.main import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as client:
        yield client


@pytest.fixture(scope="module")
def gap(client):
    return client.get("/api/v1/instances/canonical/E3").json()


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_canonical_listing_and_unknown_name(client):
    names = client.get("/api/v1/instances/canonical").json()["names"]
    assert names == ["E1", "E2", "E3"]
    response = client.get("/api/v1/instances/canonical/E9")
    assert response.status_code == 404
    assert response.json()["error"] is True


def test_solve_gap(client, gap):
    response = client.post("/api/v1/solve", json={"instance": gap})
    assert response.status_code == 200
    data = response.json()
    assert data["optimal_value"] == "3/2"
    assert data["classical_optimal_value"] == "2"
    assert data["tau_hat"] == {"u": 2, "d": 2}
    assert data["criterion"]["optimal"] is True


def test_solve_rejects_unpredictable_start(client, gap):
    body = {"instance": gap, "at": {"u": 1, "d": 2}}
    response = client.post("/api/v1/solve", json=body)
    assert response.status_code == 422
    assert response.json()["context"]["class"] == "stopping"


def test_decimal_probability_returns_pointer(client, gap):
    bad = {**gap, "outcomes": [{"id": "u", "prob": "0.5"}, {"id": "d", "prob": "1/2"}]}
    response = client.post("/api/v1/solve", json={"instance": bad})
    assert response.status_code == 422
    body = response.json()
    assert body["error_code"] == "SCHEMA_ERROR"
    assert body["context"]["pointer"] == "/instance/outcomes/0/prob"


def test_verify_gap(client, gap):
    body = {"instance": gap, "props": ["oracle-equivalence"]}
    response = client.post("/api/v1/verify", json=body)
    assert response.status_code == 200
    data = response.json()
    assert data["summary"]["pass"] == 1
    assert data["properties"][0]["id"] == "oracle-equivalence"


def test_verify_with_sample_limit_is_partial(client, gap):
    body = {"instance": gap, "props": ["strict-value-bound"], "sample_limit": 1}
    response = client.post("/api/v1/verify", json=body)
    assert response.status_code == 200
    assert response.json()["properties"][0]["partial"] is True
    body["sample_limit"] = 0
    assert client.post("/api/v1/verify", json=body).status_code == 422


def test_enumerate_gap(client, gap):
    response = client.post("/api/v1/enumerate", json={"instance": gap, "from": 0})
    assert response.status_code == 200
    data = response.json()
    assert data["from"] == {"u": 0, "d": 0}
    assert [row["expected"] for row in data["times"]] == ["0", "1", "3/2"]


def test_enumerate_over_budget(client, gap):
    response = client.post("/api/v1/enumerate?budget=2", json={"instance": gap})
    assert response.status_code == 413


def test_decompose_gap(client, gap):
    response = client.post("/api/v1/decompose", json={"instance": gap})
    assert response.status_code == 200
    data = response.json()
    assert data["at"] == {"u": 0, "d": 0}
    assert all(row["values"] == {"u": "0", "d": "0"} for row in data["delta_c"])


def test_generate_is_deterministic(client):
    body = {"seed": 5, "max_outcomes": 3, "horizon": 2}
    first = client.post("/api/v1/instances/generate", json=body)
    second = client.post("/api/v1/instances/generate", json=body)
    assert first.status_code == 200
    assert first.json() == second.json()
    assert first.json()["name"] == "random-5"
