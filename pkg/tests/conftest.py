import numpy as np
import pytest

from minkcurv import EllipsoidNorm, EuclideanNorm, QuarticNorm

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record ``(number, title, passed, detail)`` for the terminal summary."""

    def record(number, title, passed, detail=""):
        _RESULTS[number] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, detail = _RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}  [{detail}]")


@pytest.fixture(scope="session")
def norms():
    return {
        "euclidean": EuclideanNorm(),
        "ellipsoid": EllipsoidNorm(np.diag([1.0, 1.0, 2.0])),
        "quartic_0.05": QuarticNorm(0.05),
        "quartic_0.1": QuarticNorm(0.1),
    }
