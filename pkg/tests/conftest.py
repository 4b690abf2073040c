import pytest

_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line, then assert it."""

    def _report(name, ok, detail):
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
