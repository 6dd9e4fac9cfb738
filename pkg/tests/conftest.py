import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import re

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    state = _ACCEPTANCE.setdefault(n, {"ok": True, "time": 0.0})
    state["time"] += report.duration
    if report.failed:
        state["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        s = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if s['ok'] else 'FAIL'} ({s['time']:.1f}s)")
