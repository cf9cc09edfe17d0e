import pytest

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    k, title = mark.args
    detail = "; ".join(v for n, v in item.user_properties if n == "detail")
    entry = _criteria.setdefault(k, [title, True, 0.0, []])
    entry[1] = entry[1] and rep.passed
    entry[2] += rep.duration
    if detail:
        entry[3].append(detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_criteria):
        title, ok, dt, details = _criteria[k]
        line = f"criterion {k:>2} {'PASS' if ok else 'FAIL'}  {title} ({dt:.2f} s)"
        tr.write_line(line + (f"  [{'; '.join(details)}]" if details else ""))
