"""
Shared fixtures: the resource specifications from specs/fig1.spec and a
few small grids.
"""
from pathlib import Path

import pytest

from app.models.labels import TimedLabel
from app.models.lattice import GridConfig
from app.services.dsl import parse_spec

SPECS = Path(__file__).parent / "specs"


@pytest.fixture(scope="session")
def fig1_text() -> str:
    return (SPECS / "fig1.spec").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fig1(fig1_text):
    return parse_spec(fig1_text)


@pytest.fixture
def grid6() -> GridConfig:
    return GridConfig(step=1, lead_bound=6, value_cap=6)


def delay(lo, hi=None) -> TimedLabel:
    return TimedLabel.delay(lo, hi)


def act(name: str) -> TimedLabel:
    return TimedLabel.act(name)


def successors(system, state, label):
    """Targets of the may transitions of ``system`` leaving ``state`` with ``label``."""
    return [t.target for t in system.may_from.get(state, ()) if t.label == label]
