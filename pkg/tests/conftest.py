import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_RESULTS, key=lambda s: int(s.split("_")[2])):
        num = int(name.split("_")[2])
        status = "PASS" if _RESULTS[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {status}  ({name})")
