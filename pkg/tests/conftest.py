import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a criterion outcome for the end-of-run summary."""
    number = request.node.get_closest_marker("criterion").args[0]
    yield number
    rep = getattr(request.node, "rep_call", None)
    _CRITERIA[number] = _CRITERIA.get(number, True) and rep is not None and rep.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status = "PASS" if _CRITERIA[number] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}")
