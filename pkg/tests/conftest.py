import pytest

_LINES: list[str] = []


@pytest.fixture
def announce(request, capsys):
    """Print a line past output capture and repeat it in the run summary."""
    def emit(line: str):
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
