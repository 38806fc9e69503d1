import numpy as np
import pytest

from srtm.errors import ModelError
from srtm.model import SrtmModel
from srtm.simulation import (benchmark_model, make_rng, random_model, read_trajectory_csv,
                             simulate, sinusoidal_inputs, write_trajectory_csv)

from .conftest import make_case


def test_noiseless_constant_state():
    C = np.array([[1.0, -2.0], [0.5, 0.0]])
    model = SrtmModel(A=np.eye(2), C=C, Q=np.zeros((2, 2)), R=np.zeros((2, 2)),
                      m0=np.array([1.0, 2.0]), P0=np.zeros((2, 2)), l=4)
    traj = simulate(model, 5, seed=0)
    np.testing.assert_array_equal(traj.states, np.tile([1.0, 2.0], (21, 1)))
    np.testing.assert_allclose(traj.measurements, np.tile(C @ [1.0, 2.0], (5, 1)))


def test_l1_noiseless_measurements_are_current_state():
    model, _, _ = make_case(1, l=1, N=1)
    model = SrtmModel(A=model.A, B=model.B, C=model.C, Q=model.Q, R=np.zeros_like(model.R),
                      m0=model.m0, P0=model.P0, l=1)
    traj = simulate(model, 10, seed=3)
    np.testing.assert_allclose(traj.measurements, traj.states[1:] @ model.C.T, atol=1e-12)


def test_measurement_noise_statistics():
    model, _, _ = make_case(2, n_y=2, l=3, N=1)
    N = 10_000
    traj = simulate(model, N, seed=5)
    resid = traj.measurements - traj.fast_states().mean(axis=1) @ model.C.T
    sigma = np.sqrt(np.diag(model.R))
    assert np.all(np.abs(resid.mean(axis=0)) < 4 * sigma / np.sqrt(N))
    np.testing.assert_allclose(np.cov(resid.T), model.R, rtol=0.1, atol=0.05)


def test_determinism():
    model, inputs, _ = make_case(3, l=4, N=1)
    a = simulate(model, 20, sinusoidal_inputs(model, 20), seed=9)
    b = simulate(model, 20, sinusoidal_inputs(model, 20), seed=9)
    c = simulate(model, 20, sinusoidal_inputs(model, 20), seed=10)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.measurements, b.measurements)
    assert not np.array_equal(a.states, c.states)


def test_rng_is_pcg64():
    assert isinstance(make_rng(0).bit_generator, np.random.PCG64)
    assert make_rng(1).standard_normal() == np.random.Generator(np.random.PCG64(1)).standard_normal()


@pytest.mark.parametrize("seed", range(5))
def test_benchmark_model_is_stable(seed):
    model = benchmark_model(seed=seed)
    assert (model.n_x, model.n_y, model.n_u, model.l) == (4, 2, 1, 16)
    assert np.abs(np.linalg.eigvals(model.A)).max() < 1
    traj = simulate(model, 100, seed=seed)  # 1600 fast steps
    assert np.all(np.isfinite(traj.states))
    assert np.abs(traj.states).max() < 20


def test_random_model_radius():
    m = random_model(np.random.default_rng(0), 4, 2, 1, 3, radius=(0.7, 0.7))
    assert abs(np.abs(np.linalg.eigvals(m.A)).max() - 0.7) < 1e-12


def test_simulate_rejects_bad_input():
    model, _, _ = make_case(4, n_u=1, l=2, N=1)
    with pytest.raises(ModelError):
        simulate(model, 0)
    with pytest.raises(ModelError):
        simulate(model, 5, np.zeros((3, 1)))


def test_csv_roundtrip(tmp_path):
    model, inputs, traj = make_case(5, l=3, N=4)
    write_trajectory_csv(tmp_path / "t.csv", traj)
    back = read_trajectory_csv(tmp_path / "t.csv")
    assert back.l == 3
    np.testing.assert_array_equal(back.states, traj.states)
    np.testing.assert_array_equal(back.measurements, traj.measurements)
    np.testing.assert_array_equal(back.inputs, traj.inputs)
    header = (tmp_path / "t.csv").read_text().splitlines()[0]
    assert header.startswith("k,i,x0,x1,x2,y0,y1,u0")
