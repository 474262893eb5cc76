import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, budget): acceptance criterion n with a time budget in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    label, budget = mark.args
    _results[str(label)] = (report.passed, report.duration, budget, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_results, key=lambda s: (int("".join(c for c in s if c.isdigit())), s)):
        passed, took, budget, name = _results[label]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {label:<3} {verdict}  {took:6.2f}s / {budget}s  ({name})")
