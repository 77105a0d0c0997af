import pytest

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def record(request):
    """Store one pass/fail line for an acceptance criterion; printed in the terminal summary."""
    store = request.config.stash[ACCEPTANCE]

    def _record(number: int, ok: bool, detail: str) -> None:
        store[number] = (ok, detail)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        ok, detail = store[number]
        terminalreporter.write_line(f"ACCEPTANCE criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
