import numpy as np
import pytest

_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title, seconds = mark.args
    failed = [line for line in rep.longreprtext.splitlines() if line.startswith("E ")] if rep.failed else []
    item.config.stash[_CRITERIA].append((number, title, seconds, rep.passed, call.duration, failed))


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(config.stash[_CRITERIA])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, seconds, passed, duration, failed in rows:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {title}  ({duration:.1f} s, bound {seconds} s)")
        for line in failed[:6]:
            terminalreporter.write_line(f"    {line[2:].strip()}")
