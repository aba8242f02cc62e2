import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

_acceptance_results: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome, duration in sorted(_acceptance_results):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{name}: {verdict} ({duration:.1f}s)")
