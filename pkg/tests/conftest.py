import numpy as np
import pytest

from hybridsqueeze.params import frame_from_detunings, frame_params, table1_device


@pytest.fixture
def device():
    return table1_device()


@pytest.fixture
def fp25(device):
    return frame_params(device, r_p=2.5)


@pytest.fixture
def fig3fp(device):
    return frame_from_detunings(device, 1.54, -55.0, -45.0, -45.0, lam_r_over_gr=1.0)


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = X @ X.conj().T
    return rho / np.trace(rho)
