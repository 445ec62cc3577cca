import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mixela.problems import hier1, hier1_space  # noqa: E402


@pytest.fixture
def fig2_space():
    return hier1_space()


@pytest.fixture
def hier1_problem():
    return hier1()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
