"""Per-criterion summary for the acceptance suite.

Tests marked ``@pytest.mark.criterion(n, budget=seconds)`` are grouped by
``n``; a criterion passes when every test in its group passed and their
combined call time stayed within the budget.
"""

import pytest

_RESULTS: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and not report.failed:
        return
    n = mark.args[0]
    entry = _RESULTS.setdefault(n, {"budget": mark.kwargs.get("budget"), "time": 0.0, "failed": []})
    entry["time"] += report.duration
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        entry = _RESULTS[n]
        budget = entry["budget"]
        slow = budget is not None and entry["time"] > budget
        ok = not entry["failed"] and not slow
        detail = f"{entry['time']:.2f}s" + (f" / {budget}s budget" if budget else "")
        if entry["failed"]:
            detail += "; failing: " + ", ".join(entry["failed"])
        if slow:
            detail += "; over time budget"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
