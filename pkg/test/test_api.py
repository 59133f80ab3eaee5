import json

import pytest
from fastapi.testclient import TestClient

from main import app


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


@pytest.fixture
def demo_payload(demo_path):
    with open(demo_path, encoding="utf-8") as f:
        return json.load(f)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert "irl1l2" in body["methods"]


def test_solve_endpoint(client, demo_payload):
    response = client.post(
        "/solve", json={"system": demo_payload, "method": "ega", "epsilon": 0.0}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["x_hat"] == pytest.approx([1.0, 0.0])
    assert body["verified"] is True
    assert "unique" in body


def test_solve_rejects_bad_system(client):
    response = client.post("/solve", json={"system": {"n": 2, "d": 2}, "method": "ega"})
    assert response.status_code == 422
    assert "either 'equations'" in response.json()["detail"]


def test_solve_rejects_unknown_method(client, demo_payload):
    response = client.post("/solve", json={"system": demo_payload, "method": "magic"})
    assert response.status_code == 422


def test_request_validation(client, demo_payload):
    response = client.post("/solve", json={"system": demo_payload, "noise_epsilon": -1})
    assert response.status_code == 422


def test_certify_endpoint(client, demo_payload):
    response = client.post("/certify", json={"system": demo_payload, "k": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["n"] == 2 and body["M"] == 5 and body["m"] == 3
    assert body["checks"]["Thm1"]["lhs"] == 1


def test_lift_endpoint(client):
    response = client.post("/lift", json={"n": 2, "d": 2, "x": [1.0, 0.0]})
    assert response.status_code == 200
    assert response.json()["phi"] == [1.0, 0.0, 1.0, 0.0, 0.0]

    response = client.post("/lift", json={"n": 2, "d": 2, "x": [1.0]})
    assert response.status_code == 422
