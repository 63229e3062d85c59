"""
Tests for the HTTP API.
"""
import pytest
from fastapi.testclient import TestClient

from app.config import settings
from app.main import app

client = TestClient(app)

DISJOINT = """
mecs A { initial p; must p -> p : a [a<=1]; }
mecs B { initial q; must q -> q : a [a>=3]; }
"""


def test_health():
    assert client.get("/health").json() == {"status": "healthy"}
    assert client.get("/").json()["status"] == "ok"


def test_check(fig1_text):
    response = client.post("/api/v1/check", json={"spec": fig1_text})
    assert response.status_code == 200
    systems = {s["name"]: s for s in response.json()["systems"]}
    assert set(systems) == {"S", "S1", "S2", "T"}
    assert systems["S"]["states"] == 3


def test_distance(fig1_text):
    response = client.post("/api/v1/distance", json={"spec": fig1_text, "left": "S2", "right": "S"})
    assert response.status_code == 200
    assert response.json()["value"] == "1"


def test_distance_with_overrides(fig1_text):
    response = client.post("/api/v1/distance", json={
        "spec": fig1_text, "left": "S", "right": "S", "options": {"timing": "standard", "clock_cap": 6},
    })
    assert response.status_code == 200
    assert response.json()["value"] == "0"


def test_refine(fig1_text):
    response = client.post("/api/v1/refine", json={"spec": fig1_text, "left": "S2", "right": "S"})
    assert response.status_code == 200
    body = response.json()
    assert body["refines"] is False
    assert body["counterexample"]


def test_constructions(fig1_text):
    response = client.post("/api/v1/compose", json={"spec": fig1_text, "left": "S", "right": "T"})
    assert response.status_code == 200
    assert response.json()["kind"] == "mecs"
    assert response.json()["text"].startswith("mecs S_compose_T {")
    response = client.post("/api/v1/widen", json={"spec": fig1_text, "name": "S", "amount": "1"})
    assert "get<=3" in response.json()["text"]


def test_dot(fig1_text):
    response = client.post("/api/v1/dot", json={"spec": fig1_text, "name": "T"})
    assert response.status_code == 200
    assert response.json()["dot"].startswith("digraph")


@pytest.mark.parametrize("payload", [
    {"spec": "mecs A { initial q", "left": "A", "right": "A"},
    {"spec": "mecs A { initial q; }", "left": "A", "right": "B"},
    {"spec": "mecs A { initial q; }", "left": "A", "right": "A", "options": {"step": "x"}},
    {"left": "A", "right": "A"},
])
def test_bad_input_is_unprocessable(payload):
    assert client.post("/api/v1/distance", json=payload).status_code == 422


def test_missing_construction_is_a_conflict():
    response = client.post("/api/v1/conjoin", json={"spec": DISJOINT, "left": "A", "right": "B"})
    assert response.status_code == 409


def test_budget_is_too_large(fig1_text, monkeypatch):
    monkeypatch.setattr(settings, "state_budget", 3)
    response = client.post("/api/v1/semantics", json={"spec": fig1_text, "name": "S"})
    assert response.status_code == 413
