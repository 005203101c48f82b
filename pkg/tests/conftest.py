"""Shared test plumbing: the acceptance-criteria report."""

import pytest

_criterion_lines: list[str] = []


@pytest.fixture
def criterion_report():
    """Record one PASS/FAIL line per acceptance criterion.

    The line is printed immediately (visible with -s or on failure) and
    repeated in the terminal summary so a full run always ends with one
    line per criterion.
    """

    def _report(number: int, passed: bool, detail: str = ""):
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f" - {detail}"
        _criterion_lines.append(line)
        print(line)
        assert passed, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
