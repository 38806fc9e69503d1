import numpy as np
import pytest

from srtm._kernels import available
from srtm.simulation import random_model, simulate, sinusoidal_inputs

ACCEPTANCE_RESULTS = {}


@pytest.fixture(params=available())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_case(seed, n_x=3, n_y=2, n_u=1, l=3, N=4, radius=(0.5, 0.98)):
    """Random model with sinusoidal inputs and a simulated trajectory."""
    rng = np.random.default_rng(seed)
    model = random_model(rng, n_x, n_y, n_u, l, radius=radius)
    inputs = sinusoidal_inputs(model, N, period=7.0)
    traj = simulate(model, N, inputs, seed=seed)
    return model, inputs, traj


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


def _spd(rng, n, batch=()):
    X = rng.standard_normal((*batch, n, n))
    return X @ np.swapaxes(X, -1, -2) / n + 0.1 * np.eye(n)


def random_filter_parts(rng, n, batch=()):
    """Random valid filter-element parts (F, d, D, eta, J): D and J are SPD."""
    return (rng.standard_normal((*batch, n, n)) / np.sqrt(n), rng.standard_normal((*batch, n)),
            _spd(rng, n, batch), rng.standard_normal((*batch, n)), _spd(rng, n, batch))


def random_smoother_parts(rng, n, batch=()):
    return (rng.standard_normal((*batch, n, n)) / np.sqrt(n), rng.standard_normal((*batch, n)),
            _spd(rng, n, batch))
