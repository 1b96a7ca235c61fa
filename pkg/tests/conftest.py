import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Record ``(criterion, passed, detail)``; printed in the terminal summary."""
    log = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number, passed, detail):
        log[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE_KEY, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        passed, detail = log[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
