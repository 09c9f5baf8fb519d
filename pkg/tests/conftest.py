import numpy as np
import pytest
from hypothesis import settings

from agrook.function_field import Curve

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")

SPLIT_QUINTIC_11 = "hyper/q=11/f=0,2,5,2,1,1"   # x(x-1)(x-2)(x-3)(x-4) over GF(11)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def rational11():
    return Curve.parse("rational/q=11")


@pytest.fixture(scope="session")
def hyper11():
    return Curve.parse(SPLIT_QUINTIC_11)


@pytest.fixture(scope="session")
def herm3():
    return Curve.parse("hermitian/q0=3")


# -- one summary line per acceptance criterion ---------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA[num] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[num]
        line = f"[{status}] criterion {num}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
