import numpy as np
import pytest
from hypothesis import strategies as st

from statdist import make_density

TAU = np.array([0.5, 0.5])
M = np.array([0.25, 0.75])


@pytest.fixture
def running_pair():
    return make_density([0, 1], TAU), make_density([0, 1], M)


def pmf_strategy(size, allow_zero=True):
    """Probability vectors of a fixed length built from normalised weights."""
    low = 0.0 if allow_zero else 0.01
    weights = st.lists(st.floats(low, 1.0), min_size=size, max_size=size).filter(lambda w: sum(w) > 0.01)
    return weights.map(lambda w: np.asarray(w) / np.sum(w))


@st.composite
def pmf_pairs(draw, min_size=2, max_size=12, allow_zero=True):
    k = draw(st.integers(min_size, max_size))
    return draw(pmf_strategy(k, allow_zero)), draw(pmf_strategy(k, allow_zero))


@st.composite
def pmf_triples(draw, min_size=2, max_size=12, allow_zero=True):
    k = draw(st.integers(min_size, max_size))
    return tuple(draw(pmf_strategy(k, allow_zero)) for _ in range(3))


ACCEPTANCE_LINES = {}


def pytest_runtest_makereport(item, call):
    criterion = item.get_closest_marker("criterion")
    if criterion is None or call.when != "call":
        return
    status = "PASS" if call.excinfo is None else "FAIL"
    ACCEPTANCE_LINES[criterion.args[0]] = f"criterion {criterion.args[0]:>2}: {status}  {criterion.args[1]}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
