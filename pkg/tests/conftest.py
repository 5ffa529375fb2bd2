import numpy as np
import pytest

RUNNING = [5, 3, 5, 9, 3, 3, 120, 5]


def u64(values):
    return np.array(values, dtype=np.uint64)


@pytest.fixture
def running():
    return u64(RUNNING)


def heavy_fixture(seed=0):
    """w=8, n=32: value 2 six times (needs a companion), 3..27 once, 40 once."""
    vals = [2] * 6 + list(range(3, 28)) + [40]
    rng = np.random.default_rng(seed)
    rng.shuffle(vals)
    return u64(vals)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    status = "PASS" if ok is True else ("INFO" if ok is None else "FAIL")
    line = f"[{status}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
