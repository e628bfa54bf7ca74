import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    num, title = mark.args
    if report.failed or report.when == "call" or num not in _criteria:
        status = "FAIL" if report.failed else ("SKIP" if report.skipped else "PASS")
        if report.when == "setup" and status == "PASS":
            return
        prev = _criteria.get(num)
        if prev is None or prev[1] != "FAIL":
            _criteria[num] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}: {title}")
