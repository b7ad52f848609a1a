from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_ac"):
        return
    key = name.split("_")[1].upper()
    prev = _CRITERIA.get(key, ("PASS", name))
    if prev[0] == "FAIL":
        return
    _CRITERIA[key] = ("PASS" if report.passed else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k[2:])):
        outcome, name = _CRITERIA[key]
        terminalreporter.write_line(f"{key}: {outcome} ({name})")
