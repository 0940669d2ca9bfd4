import os
import sys

import pytest

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def record_criterion():
    def record(key: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS[key] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")
