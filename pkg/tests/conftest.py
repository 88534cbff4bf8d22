from __future__ import annotations

import pytest

_criterion_lines: list[str] = []


@pytest.fixture(scope="session")
def criterion_log():
    return _criterion_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
