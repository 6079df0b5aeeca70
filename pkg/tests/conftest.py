import sys

import numpy as np
import pytest

from besselfrac.basis import compute_zeros, default_quad_order, gauss_legendre
from besselfrac.funcs import poly21, poly43, poly44  # noqa: F401


@pytest.fixture(scope="session")
def basis80():
    return compute_zeros(80)


@pytest.fixture(scope="session")
def basis40(basis80):
    return basis80.truncate(40)


@pytest.fixture(scope="session")
def basis50(basis80):
    return basis80.truncate(50)


@pytest.fixture(scope="session")
def basis20(basis80):
    return basis80.truncate(20)


def quad_for(basis):
    return gauss_legendre(default_quad_order(basis.size))


@pytest.fixture
def grid101():
    return np.linspace(0.0, 1.0, 101)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
