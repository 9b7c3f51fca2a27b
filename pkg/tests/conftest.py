import numpy as np
import pytest

from lowlat_mpc import SessionConfig, run_session


def session(program, **overrides):
    return run_session(program, SessionConfig(**overrides))


def held_by(ctx, owner, value):
    return value if ctx.party == owner else None


def quantize(x, bits=16):
    return np.round(np.asarray(x, dtype=float) * 2.0 ** bits) / 2.0 ** bits


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    if rep.when == "setup" and rep.passed:
        return
    _CRITERIA.setdefault(number, [title, True])
    _CRITERIA[number][1] &= rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title}")
