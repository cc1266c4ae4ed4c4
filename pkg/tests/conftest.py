"""Shared test helpers.

The acceptance tests register one line per criterion through
`record_criterion`; the collected lines are printed in a dedicated
section at the end of the pytest run so the verdicts are visible at a
glance even among hundreds of unit tests.
"""

from __future__ import annotations

_CRITERION_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, description: str, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number}: {status} - {description}"
    if detail:
        line += f" ({detail})"
    _CRITERION_LINES[number] = line


def record_criterion_skip(number: int, description: str, reason: str) -> None:
    _CRITERION_LINES[number] = f"criterion {number}: SKIP - {description} ({reason})"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])
