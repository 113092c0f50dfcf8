import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Collect one status line per acceptance criterion for the terminal summary."""
    def add(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{label:<5s} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    add.note = lambda line: (ACCEPTANCE_LINES.append(line), print(line))
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
