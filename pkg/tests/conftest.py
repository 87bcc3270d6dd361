import pytest

_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, passed, detail)``."""
    store = request.config.stash.setdefault(_KEY, {})

    def record(number: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        store[number] = line
        print(line)
        return passed

    return record


def _sort_key(number: str):
    digits = "".join(c for c in number if c.isdigit())
    return int(digits), number


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_KEY, {})
    if store:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(store, key=_sort_key):
            terminalreporter.write_line(store[number])
