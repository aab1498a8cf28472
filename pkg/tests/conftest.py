import os

import pytest
from hypothesis import HealthCheck, settings

from frobmult import paperdata as pd

settings.register_profile("default", max_examples=100, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def A():
    return pd.build_A(2)


@pytest.fixture(scope="session")
def N():
    return pd.build_N(2)


@pytest.fixture(scope="session")
def R():
    return pd.build_R_presentation()


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
