import numpy as np
import pytest

from probit_ep import EPConfig, PriorConfig, ep_dense_fit, ep_lowrank_fit, validate


@pytest.fixture(scope="session", autouse=True)
def _warm_runtime():
    # first numpy/BLAS touch pays one-off setup costs; keep them out of
    # the timing-sensitive tests
    data = validate(np.array([[1.0]]), np.array([1]))
    prior = PriorConfig(1.0)
    ep_dense_fit(data, prior, EPConfig())
    ep_lowrank_fit(data, prior, EPConfig())
    yield


@pytest.fixture
def single_site():
    return validate(np.array([[1.0]]), np.array([1])), PriorConfig(1.0)
