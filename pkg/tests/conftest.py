import sys

import numpy as np
import pytest

from flowcap import Evaluator, generate_grid_instance, generate_x_instance, nominal_intents


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the one-line acceptance verdicts past pytest's output capture."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    for line in getattr(mod, "REPORT_LINES", []) if mod else []:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def x_scenario():
    return generate_x_instance()


@pytest.fixture(scope="session")
def grid_scenario():
    return generate_grid_instance()


@pytest.fixture(scope="session")
def x_nominal_field(x_scenario):
    """Occupancy field of the all-nominal X-instance schedule (expensive, shared)."""
    ev = Evaluator(x_scenario)
    return ev.field(nominal_intents(x_scenario))


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(1234))
