import pytest
from hypothesis import settings

# Sieve and lattice examples are not uniformly fast on a single core.
settings.register_profile("default", deadline=None)
settings.load_profile("default")

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _CRITERIA[n] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"[{status}] {n:2d}. {title}: {detail}")
