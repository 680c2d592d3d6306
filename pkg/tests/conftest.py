import pytest

_CRITERIA: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    num = name.split("_")[2]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = report.outcome
        if hasattr(report, "wasxfail"):
            outcome = "xfail"
        _CRITERIA.setdefault(num, []).append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA, key=int):
        outcomes = _CRITERIA[num]
        ok = all(o in ("passed", "xfail") for o in outcomes)
        terminalreporter.write_line(f"criterion {int(num):2d}: {'PASS' if ok else 'FAIL'}  ({', '.join(outcomes)})")
