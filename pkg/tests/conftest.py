import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, str, float, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with a runtime limit in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    mark = item.get_closest_marker("criterion")
    start = time.perf_counter()
    outcome = yield
    if mark is None:
        return
    number, title, limit = mark.args
    elapsed = time.perf_counter() - start
    status = "PASS" if outcome.excinfo is None else "FAIL"
    if status == "PASS" and elapsed > limit:
        status = "FAIL"
        outcome.force_exception(AssertionError(f"took {elapsed:.1f} s, limit {limit} s"))
    _criteria[number] = (status, title, elapsed, limit)
    print(f"\n{status} criterion {number}: {title} ({elapsed:.1f} s, limit {limit} s)")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, elapsed, limit = _criteria[number]
        terminalreporter.write_line(f"{status} {number:>2}  {title}  [{elapsed:.1f} s / {limit} s]")
