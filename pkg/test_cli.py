"""
Tests for the command-line interface.
"""
import json

import pytest

from app.cli import main
from app.config import settings
from app.services.dsl import parse_spec

DISJOINT = """
mecs A { initial p; must p -> p : a [a<=1]; }
mecs B { initial q; must q -> q : a [a>=3]; }
"""


@pytest.fixture
def fig1_file(tmp_path, fig1_text):
    path = tmp_path / "fig1.spec"
    path.write_text(fig1_text, encoding="utf-8")
    return path


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    return code, capsys.readouterr().out


def test_distance(capsys, fig1_file):
    code, out = run(capsys, "distance", fig1_file, "S2", "S")
    assert code == 0
    assert out.splitlines() == ["1", "saturated=false"]
    code, out = run(capsys, "distance", fig1_file, "S", "S")
    assert out.splitlines()[0] == "0"


def test_distance_json(capsys, fig1_file):
    code, out = run(capsys, "distance", fig1_file, "S1", "S", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == "0"
    assert payload["saturated"] is False


def test_refine(capsys, fig1_file):
    code, out = run(capsys, "refine", fig1_file, "S1", "S")
    assert code == 0
    assert out.startswith("refines")
    code, out = run(capsys, "refine", fig1_file, "S2", "S")
    assert code == 1
    assert out.startswith("does not refine")


def test_check(capsys, fig1_file):
    code, out = run(capsys, "check", fig1_file)
    assert code == 0
    assert "S2: mecs, 5 states, consistent, deterministic" in out


def test_compose_appends_to_the_file(capsys, fig1_file):
    code, out = run(capsys, "compose", fig1_file, "S", "T", "--out", "ST")
    assert code == 0
    assert out.startswith("mecs ST {")
    assert "ST" in parse_spec(fig1_file.read_text(encoding="utf-8")).names


def test_widen_appends_to_the_file(capsys, fig1_file):
    code, _ = run(capsys, "widen", fig1_file, "S", "1")
    assert code == 0
    widened = parse_spec(fig1_file.read_text(encoding="utf-8")).get("S_widen_1")
    assert len(widened.must) == 3


def test_missing_construction(capsys, tmp_path):
    path = tmp_path / "disjoint.spec"
    path.write_text(DISJOINT, encoding="utf-8")
    code, _ = run(capsys, "conjoin", path, "A", "B")
    assert code == 2
    assert "A_conjoin_B" not in path.read_text(encoding="utf-8")


def test_input_errors(capsys, tmp_path, fig1_file):
    broken = tmp_path / "broken.spec"
    broken.write_text("mecs A { initial q", encoding="utf-8")
    assert run(capsys, "check", broken)[0] == 3
    assert run(capsys, "distance", fig1_file, "S", "Nope")[0] == 3
    assert run(capsys, "check", tmp_path / "missing.spec")[0] == 3


def test_budget(capsys, fig1_file, monkeypatch):
    monkeypatch.setattr(settings, "state_budget", 3)
    assert run(capsys, "semantics", fig1_file, "S")[0] == 4


def test_semantics_json(capsys, fig1_file):
    code, out = run(capsys, "semantics", fig1_file, "S1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"states", "initial", "may", "must"}
    assert payload["initial"] in payload["states"]


def test_dot(capsys, fig1_file):
    code, out = run(capsys, "dot", fig1_file, "S")
    assert code == 0
    assert out.startswith("digraph")
    assert out.count("dashed") == 1
