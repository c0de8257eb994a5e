import pytest
from fastapi.testclient import TestClient

from cimdse.api import create_app
from cimdse.orchestrator import Orchestrator

SINGLE_TEXT = ("Simulate ResNet-50 on ImageNet with a 22nm SRAM macro. The "
               "subarray size is 256x256 with a SAR ADC, ADC precision 6bit, "
               "and mux 8.")
INCOMPLETE_TEXT = "Simulate VGG8 on CIFAR-10 with SRAM and ADC precision 5bit"


@pytest.fixture
def client(tmp_path):
    orch = Orchestrator(tmp_path / "data", seed=0)  # synchronous execution
    return TestClient(create_app(orch))


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_full_session_flow(client):
    sid = client.post("/sessions").json()["id"]

    turn = client.post(f"/sessions/{sid}/messages",
                       json={"text": INCOMPLETE_TEXT}).json()
    assert turn["state"] == "awaiting_adjustment"
    assert turn["missing"]

    turn = client.post(f"/sessions/{sid}/adjustments",
                       json={"ops": [{"op": "use_defaults"}]}).json()
    assert turn["state"] == "awaiting_confirmation"
    assert turn["missing"] == []

    job = client.post(f"/sessions/{sid}/confirm").json()
    assert job["state"] == "done"

    out = client.get(f"/jobs/{job['id']}/results").json()
    assert out["statuses"] == ["done"]
    assert out["results"][0]["record"]["fom"] > 0

    session = client.get(f"/sessions/{sid}").json()
    assert session["state"] == "done" and session["job_id"] == job["id"]


def test_unknown_ids_are_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.get("/jobs/nope").status_code == 404
    assert client.get("/jobs/nope/results").status_code == 404
    assert client.post("/sessions/nope/messages",
                       json={"text": "hi"}).status_code == 404


def test_confirm_in_wrong_state_is_409(client):
    sid = client.post("/sessions").json()["id"]
    assert client.post(f"/sessions/{sid}/confirm").status_code == 409
    client.post(f"/sessions/{sid}/messages", json={"text": SINGLE_TEXT})
    client.post(f"/sessions/{sid}/confirm")
    # session finished: no further messages accepted
    resp = client.post(f"/sessions/{sid}/messages", json={"text": SINGLE_TEXT})
    assert resp.status_code == 409


def test_malformed_bodies_are_422(client):
    sid = client.post("/sessions").json()["id"]
    assert client.post(f"/sessions/{sid}/messages", json={}).status_code == 422
    assert client.post(f"/sessions/{sid}/adjustments",
                       json={"ops": "not-a-list"}).status_code == 422


def test_empty_request_returns_error_turn(client):
    sid = client.post("/sessions").json()["id"]
    turn = client.post(f"/sessions/{sid}/messages", json={"text": "  "}).json()
    assert turn["error"] == "empty request"


def test_unknown_category_returns_clarification(client):
    sid = client.post("/sessions").json()["id"]
    turn = client.post(f"/sessions/{sid}/messages",
                       json={"text": "Hello, what can you do?"}).json()
    assert turn["category"] == "Unknown"
    assert turn["clarification"]
