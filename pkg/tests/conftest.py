"""Shared pytest plumbing.

The acceptance tests record one verdict line each; those lines are
replayed in a terminal summary section so the pass/fail ledger is always
visible, not only when a test fails and pytest shows its captured output.
"""

_CRITERION_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    """Register (and return) the verdict line for one acceptance criterion."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion-{number}: {detail}"
    _CRITERION_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])
