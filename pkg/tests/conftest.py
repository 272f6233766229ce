import numpy as np
import pytest

from glskit import make_psi_builtin


@pytest.fixture
def psi_half():
    return make_psi_builtin("power_alpha", 0.5)


@pytest.fixture
def psi_one():
    return make_psi_builtin("power_alpha", 1.0)


@pytest.fixture
def grand2():
    return make_psi_builtin("grand_b", 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance summary ---------------------------------------------------------------
# Tests marked ``acceptance(k, title)`` get one PASS/FAIL line each at the end of the run.

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    key = mark.args[0]
    failed = rep.failed or (rep.when == "call" and rep.outcome != "passed")
    prev = _ACCEPTANCE.get(key, (mark.args[1], True))
    _ACCEPTANCE[key] = (prev[0], prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{key:2d}] {title}")
