import pytest

_criteria: dict[int, tuple[str, list[bool]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    entry = _criteria.setdefault(n, (title, []))
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry[1].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, results = _criteria[n]
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
