import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shotlearn import eval_circuit, extract_series, random_params

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

MASTER_SEED = 16


@pytest.fixture(scope="session")
def target10():
    """The default depth-10 target circuit."""
    return random_params(10, seed=MASTER_SEED)


@pytest.fixture(scope="session")
def series10(target10):
    return extract_series(target10)


@pytest.fixture(scope="session")
def grid500():
    return np.linspace(0.0, 2.0 * np.pi, 500, endpoint=False)


@pytest.fixture(scope="session")
def f500(target10, grid500):
    return eval_circuit(target10, grid500)
