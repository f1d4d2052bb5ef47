import pytest

from atansum.catalog import load_catalog

# Acceptance tests append (criterion, passed, detail) here; the lines are
# printed in the terminal summary so they survive output capture.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def records():
    return load_catalog()


@pytest.fixture(scope="session")
def by_id(records):
    return {r.id: r for r in records}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
