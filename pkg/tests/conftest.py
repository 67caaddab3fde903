import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


def pytest_runtest_logreport(report):
    marks = getattr(report, "criterion", None)
    if marks is None:
        return
    number, text = marks
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if report.skipped:
            outcome = "SKIP"
        else:
            outcome = "PASS" if report.passed else "FAIL"
        _criteria[number] = (outcome, text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcome, text = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {outcome}  {text}")
