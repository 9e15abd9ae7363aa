"""Shared fixtures and the per-criterion acceptance summary."""

from __future__ import annotations

from collections import OrderedDict

import numpy as np
import pytest

from giantspin.core import FE8

_CRITERIA: "OrderedDict[int, list[tuple[str, bool]]]" = OrderedDict()


@pytest.fixture
def fe8():
    return FE8


@pytest.fixture
def rng():
    return np.random.default_rng(20260314)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA.setdefault(int(marker.args[0]), []).append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        results = _CRITERIA[number]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'} [{len(results)} checks]{detail}"
        )
