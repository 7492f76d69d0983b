import sys

import pytest

from debrissim.config import default_config
from debrissim.dynamics import CompiledEom, InertiaParams
from debrissim.engine import run_scenario, symbolic_model
from debrissim.kinematics import GeometryParams


@pytest.fixture(scope="session")
def eom():
    return symbolic_model()


@pytest.fixture(scope="session")
def geometry():
    return GeometryParams()


@pytest.fixture(scope="session")
def inertia():
    return InertiaParams()


@pytest.fixture(scope="session")
def compiled(eom, geometry, inertia):
    return CompiledEom(eom, geometry, inertia)


@pytest.fixture(scope="session")
def free_compiled(eom, inertia):
    """Same model with a non-rotating base."""
    from dataclasses import replace

    return CompiledEom(eom, replace(GeometryParams(), omega0=0.0), inertia)


@pytest.fixture(scope="session")
def spacecraft_trace():
    return run_scenario(default_config("spacecraft_debris"))


@pytest.fixture(scope="session")
def ball_trace():
    return run_scenario(default_config("bouncing_ball"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
