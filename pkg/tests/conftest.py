import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_acceptance():
    def record(criterion, status, detail=""):
        ACCEPTANCE_LINES.append(f"[{status}] criterion {criterion}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
