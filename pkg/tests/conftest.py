import numpy as np
import pytest

from tvarma import constant_path


@pytest.fixture
def ar1():
    return constant_path((0.5,), drift=1.0, sigma2=1.0)


@pytest.fixture
def arma11():
    return constant_path((0.6,), (0.4,), drift=0.5, sigma2=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
