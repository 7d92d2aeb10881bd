"""Pytest hooks: surface the acceptance-criterion verdict lines.

Acceptance tests register one PASS/FAIL line each via ``record_verdict``;
the lines are printed in the terminal summary so they survive output
capture regardless of the -s flag.
"""

_VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in _VERDICTS:
        terminalreporter.write_line(line)
