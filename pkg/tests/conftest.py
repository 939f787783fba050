import logging

import pytest

from cases import solve_catalogue
from robinstab import geometry, pattern

logging.getLogger("robinstab").setLevel(logging.ERROR)

ACCEPTANCE = {}
_SETUP = pytest.StashKey[float]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, title = mark.args
    # durations include fixture setup (e.g. solving the catalogue)
    if rep.when == "setup":
        item.stash[_SETUP] = rep.duration
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        total = rep.duration + (item.stash.get(_SETUP, 0.0) if rep.when == "call" else 0.0)
        ACCEPTANCE[num] = (title, "PASS" if rep.passed else "FAIL", total)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, status, dur = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}  ({dur:.1f} s)")


@pytest.fixture(scope="session")
def catenoid():
    return geometry.catenoid(1.0, 0.0, 1.8)


@pytest.fixture(scope="session")
def catenoid_pattern(catenoid):
    """The default construction on the catenoid profile (about one second)."""
    return pattern.construct_pattern(catenoid, beta=1.0, n=2048)


@pytest.fixture(scope="session")
def solved_catalogue():
    return solve_catalogue()
