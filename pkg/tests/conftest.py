from __future__ import annotations

import pytest

from bullwhip.model import ChainParameters, DemandModel, EntityState, ROLES, Role, WorldState
from bullwhip.sim import make_rng


def make_world(day: int = 0, **entities: dict) -> WorldState:
    """World with empty pipelines; keyword per role name overrides EntityState fields."""
    states = {}
    for role in ROLES:
        fields = dict(entities.get(role.value.lower(), {}))
        states[role] = EntityState(role=role, **fields)
    return WorldState(day=day, horizon=150, entities=states, chain=ChainParameters(),
                      demand_model=DemandModel(), rng=make_rng(0))


@pytest.fixture
def world_factory():
    return make_world


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
