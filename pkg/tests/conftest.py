"""Prints one PASS/FAIL line per acceptance criterion at the end of the run.

Acceptance tests tag themselves with ``record_property("criterion", label)``
and may add ``record_property("detail", text)`` with the measured numbers.
"""
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_results = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed:
        outcome = "PASS" if report.passed else "FAIL"
        _results[report.nodeid] = (props["criterion"], outcome, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, detail in sorted(_results.values()):
        line = f"{outcome}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
