"""Ground-truth trajectories, the benchmark model and trajectory CSV files.

Random numbers come from numpy's ``PCG64`` bit generator seeded with the
user's integer seed, so a seed reproduces a trajectory bit for bit on any
platform with the same numpy.
"""

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ModelError
from .model import InputSequence, SrtmModel, resolve_inputs


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Trajectory:
    """Simulated states ``x_0 .. x_{N*l}`` and measurements ``y_1 .. y_N``."""

    states: np.ndarray
    measurements: np.ndarray
    seed: Optional[int]
    l: int
    inputs: Optional[np.ndarray] = None

    @property
    def n_intervals(self):
        return len(self.measurements)

    def fast_states(self):
        """States ``x_{k,i}`` arranged as ``(N, l, n_x)`` (``x_0`` dropped)."""
        return self.states[1:].reshape(self.n_intervals, self.l, -1)


def _psd_factor(name, M):
    """``L`` with ``L L^T = M`` for PSD ``M`` (singular allowed)."""
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    if w.min() < -1e-10 * max(1.0, np.abs(w).max()):
        raise ModelError(f"{name} is not positive semidefinite")
    return V * np.sqrt(np.clip(w, 0.0, None))


def simulate(model, N, inputs=None, seed=0):
    if N < 1:
        raise ModelError("need at least one interval")
    l, n = model.l, model.n_x
    T = N * l
    u = resolve_inputs(model, inputs, N).u
    if len(u) < T:
        raise ModelError(f"inputs cover {len(u)} fast steps, need {T}")
    rng = make_rng(seed)
    x0_noise = rng.standard_normal(n)
    w = rng.standard_normal((T, n)) @ _psd_factor("Q", model.Q).T
    v = rng.standard_normal((N, model.n_y)) @ _psd_factor("R", model.R).T
    states = np.empty((T + 1, n))
    states[0] = model.m0 + _psd_factor("P0", model.P0) @ x0_noise
    Bu = u[:T] @ model.B.T
    for t in range(T):
        states[t + 1] = model.A @ states[t] + Bu[t] + w[t]
    means = states[1:].reshape(N, l, n).mean(axis=1)
    ys = means @ model.C.T + v
    return Trajectory(states, ys, seed, l, np.array(u[:T + 1]))


def random_model(rng, n_x, n_y, n_u=0, l=1, radius=(0.5, 0.98)):
    """A random well-conditioned model; spectral radius of ``A`` drawn from ``radius``."""
    def spd(dim, floor, scale):
        X = rng.standard_normal((dim, dim))
        return scale * (X @ X.T / dim + floor * np.eye(dim))

    A = rng.standard_normal((n_x, n_x))
    A *= rng.uniform(*radius) / max(np.abs(np.linalg.eigvals(A)).max(), 1e-12)
    return SrtmModel(A=A, B=rng.standard_normal((n_x, n_u)), C=rng.standard_normal((n_y, n_x)),
                     Q=spd(n_x, 0.2, 0.3), R=spd(n_y, 0.5, 0.5), m0=rng.standard_normal(n_x),
                     P0=spd(n_x, 0.5, 1.0), l=l)


def benchmark_model(n_x=4, n_y=2, n_u=1, l=16, seed=0):
    """Stable surrogate model for benchmarks.

    ``A = 0.95 * U`` with ``U`` a random rotation (spectral radius exactly
    0.95), ``B`` and ``C`` standard normal, ``Q = 0.05 I``, ``R = 0.5 I``,
    ``m0 = 0``, ``P0 = I``. Everything is drawn from ``PCG64(seed)``.
    """
    rng = make_rng(seed)
    U, r = np.linalg.qr(rng.standard_normal((n_x, n_x)))
    U = U * np.sign(np.diag(r))
    if np.linalg.det(U) < 0:
        U[:, 0] = -U[:, 0]
    return SrtmModel(A=0.95 * U, B=rng.standard_normal((n_x, n_u)),
                     C=rng.standard_normal((n_y, n_x)), Q=0.05 * np.eye(n_x),
                     R=0.5 * np.eye(n_y), m0=np.zeros(n_x), P0=np.eye(n_x), l=l)


def sinusoidal_inputs(model, N, period=40.0, amplitude=1.0):
    """Inputs ``u_t[c] = amplitude * sin(2 pi t / period + c pi / n_u)``, ``t = 0..N*l``."""
    t = np.arange(N * model.l + 1)[:, None]
    phase = np.pi * np.arange(model.n_u)[None, :] / max(model.n_u, 1)
    return InputSequence(amplitude * np.sin(2 * np.pi * t / period + phase), model.l)


def write_trajectory_csv(path, traj):
    """One row per fast step ``t = 0..N*l`` with columns ``k, i, x*, y*, u*``.

    ``t = 0`` is written as ``(k, i) = (0, l)``. Measurement columns are filled
    only on the last row of each interval, input columns hold ``u_t``.
    """
    n = traj.states.shape[1]
    ny = traj.measurements.shape[1]
    nu = 0 if traj.inputs is None else traj.inputs.shape[1]
    l = traj.l
    header = (["k", "i"] + [f"x{j}" for j in range(n)] + [f"y{j}" for j in range(ny)]
              + [f"u{j}" for j in range(nu)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, x in enumerate(traj.states):
            k, i = (0, l) if t == 0 else ((t - 1) // l + 1, (t - 1) % l + 1)
            y = traj.measurements[k - 1] if (k >= 1 and i == l) else [""] * ny
            u = traj.inputs[t] if (nu and t < len(traj.inputs)) else [""] * nu
            w.writerow([k, i] + [repr(float(v)) for v in x]
                       + [v if v == "" else repr(float(v)) for v in y]
                       + [v if v == "" else repr(float(v)) for v in u])


def read_trajectory_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ModelError(f"cannot read trajectory {path}: {exc}") from exc
    if len(rows) < 2:
        raise ModelError("trajectory file has no data rows")
    header = rows[0]
    xs = [j for j, h in enumerate(header) if h.startswith("x")]
    ys = [j for j, h in enumerate(header) if h.startswith("y")]
    us = [j for j, h in enumerate(header) if h.startswith("u")]
    body = rows[1:]
    try:
        l = int(body[0][1])
        states = np.array([[float(r[j]) for j in xs] for r in body])
        meas = np.array([[float(r[j]) for j in ys] for r in body[1:] if int(r[1]) == l and r[ys[0]] != ""])
        inputs = None
        if us:
            inputs = np.array([[float(r[j]) if r[j] != "" else 0.0 for j in us] for r in body])
    except (ValueError, IndexError) as exc:
        raise ModelError(f"malformed trajectory file {path}: {exc}") from exc
    if (len(states) - 1) != len(meas) * l:
        raise ModelError("trajectory rows do not match measurement count times l")
    return Trajectory(states, meas.reshape(len(meas), len(ys)), None, l, inputs)
