import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(label, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'} {text}" for text, passed in checks)
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
