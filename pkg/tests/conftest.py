"""Shared pytest configuration.

Tests marked acceptance(num, label) feed a summary section that prints one
PASS or FAIL line per acceptance criterion at the end of the run.
"""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, label): marks a test as covering one acceptance criterion",
    )


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        num, label = marker.args
        if report.when == "call":
            _RESULTS[num] = (label, report.passed)
        elif report.failed or report.skipped:
            # setup or teardown trouble means the criterion was not shown
            _RESULTS[num] = (label, False)
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS, key=int):
        label, ok = _RESULTS[num]
        tag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{tag}] criterion {num}: {label}")
