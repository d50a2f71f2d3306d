import numpy as np
import pytest
from hypothesis import settings

from povmlab.tolerance import Tolerance, set_default_tolerance

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_runtest_logreport(report):
    # acceptance tests attach a "criterion" property; collect one line each
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        status = "PASS" if report.passed else "FAIL"
        ACCEPTANCE_LINES.append(f"{status}  {props['criterion']}  {props.get('detail', '')}".rstrip())


@pytest.fixture(autouse=True)
def _default_tolerance(monkeypatch):
    monkeypatch.delenv("POVMLAB_TOLERANCE", raising=False)
    set_default_tolerance(Tolerance())
    yield
    set_default_tolerance(None)


@pytest.fixture
def rng():
    return np.random.default_rng(20140612)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
