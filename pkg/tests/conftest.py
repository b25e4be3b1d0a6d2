"""Shared fixtures and the acceptance summary printed at the end of a run.

Tests tagged ``@pytest.mark.criterion(n)`` contribute to criterion ``n``; a
criterion passes only if every test tagged with it passes. Details recorded
with ``record_property("detail", ...)`` are echoed in the summary.
"""

from __future__ import annotations

import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


def pytest_runtest_setup(item):
    for mark in item.iter_markers("criterion"):
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties) if report.user_properties else {}
    crit = [v for k, v in report.user_properties if k == "criterion"]
    if not crit:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        for n in crit:
            entry = _RESULTS.setdefault(n, {"ok": True, "details": []})
            entry["ok"] &= report.passed
            name = report.nodeid.split("::")[-1]
            detail = props.get("detail")
            entry["details"].append(f"{name}: {detail}" if detail else name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        entry = _RESULTS[n]
        tr.write_line(f"criterion {n:>2}: {'PASS' if entry['ok'] else 'FAIL'}  " + "; ".join(entry["details"]))


@pytest.fixture
def small_geometry():
    from qprop import Geometry

    return Geometry.square(64, 8.0)
