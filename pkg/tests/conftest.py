from collections import defaultdict

import pytest

_criteria: dict[int, list[str]] = defaultdict(list)


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="also run the long opt-in tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="long test, enable with --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria[n].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        failed = outcomes.count("failed")
        skipped = outcomes.count("skipped")
        ran = len(outcomes) - skipped
        status = "FAIL" if failed else "PASS"
        note = f" ({skipped} long test{'s' if skipped > 1 else ''} skipped)" if skipped else ""
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {ran - failed}/{ran} checks passed{note}")
