import pytest

RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record a named check; the summary prints one PASS/FAIL line per check."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        RESULTS.append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
