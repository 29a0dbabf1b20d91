"""Collects the one-line verdicts of the acceptance suite and prints them at the end of the run."""

ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split("-")[1])):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
