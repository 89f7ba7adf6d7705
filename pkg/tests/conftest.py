import numpy as np
import pytest

from biasdyn import bias as bz
from biasdyn.graph import build_graph
from biasdyn.scenario import VACCINE_BELIEFS, VACCINE_EDGES

# Filled by tests/test_acceptance.py, printed at the end of the session.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def vaccine_graph(kind="conf"):
    b = bz.make_bias(kind)
    return build_graph(6, [(s - 1, t - 1, w, b) for s, t, w in VACCINE_EDGES])


def two_agent_graph(kind):
    b = bz.make_bias(kind)
    return build_graph(2, [(0, 1, 1.0, b), (1, 0, 1.0, b)])


@pytest.fixture
def vaccine():
    return vaccine_graph


@pytest.fixture
def two_agent():
    return two_agent_graph


@pytest.fixture
def B0():
    return np.array(VACCINE_BELIEFS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
