import numpy as np
import pytest

from qubit_dyn import _accel


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Run a test once per kernel backend, restoring the default afterwards."""
    previous = _accel.numba_enabled()
    _accel.use_numba(request.param == "numba")
    yield request.param
    _accel.use_numba(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


@pytest.fixture
def accept():
    """Record one pass/fail line for an acceptance criterion, then assert it."""
    def record(number, name, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {name}  [{detail}]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
