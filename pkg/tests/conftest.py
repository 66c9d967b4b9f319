import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from caprese.genotype import from_rows

_ACCEPTANCE = []


def record(criterion, passed, detail):
    """Remember one acceptance line; printed in the terminal summary.
    ``passed=None`` marks a criterion that could not run."""
    status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
    line = f"{status} criterion {criterion}: {detail}"
    _ACCEPTANCE.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def d1():
    # P(a)=0.75, P(b)=0.5, P(a,b)=0.5
    return from_rows("ab", [(1, 1), (1, 1), (1, 0), (0, 0)])


@pytest.fixture
def d2():
    return from_rows("ab", [(1, 1), (1, 0), (0, 1), (0, 0)])


@pytest.fixture
def d3():
    return from_rows("ab", [(1, 0), (1, 0), (0, 1), (0, 1)])
