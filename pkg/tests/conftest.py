import pytest

from anisorlicz import mountain_pass as mp


@pytest.fixture(scope="session")
def default_spec():
    return mp.default_problem()


@pytest.fixture(scope="session")
def default_run(default_spec):
    return mp.mountain_pass_solve(default_spec)
