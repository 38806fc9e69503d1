"""Brute-force reference: exact conditioning of the full joint Gaussian.

Every fast-rate state ``x_1 .. x_{N*l}`` and every measurement is put into one
joint Gaussian, which is then conditioned with the textbook formulas. Nothing
here uses the lifted models or the estimators, so it can check both.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericalError

MAX_DIM = 512


@dataclass(frozen=True)
class JointGaussian:
    """Gaussian over the stacked states ``[x_1, ..., x_{N*l}]``.

    ``H`` maps the stacked states to the stacked measurements and
    ``noise_cov`` is the block-diagonal measurement noise.
    """

    mean: np.ndarray
    cov: np.ndarray
    H: np.ndarray
    noise_cov: np.ndarray
    n_x: int
    l: int

    @property
    def n_intervals(self):
        return len(self.mean) // (self.n_x * self.l)

    def state(self, k, i):
        """Marginal ``(mean, cov)`` of ``x_{k,i}`` (1-based interval, 1-based position)."""
        t = (k - 1) * self.l + (i - 1)
        s = slice(t * self.n_x, (t + 1) * self.n_x)
        return self.mean[s], self.cov[s, s]

    def interval(self, k):
        """Joint ``(mean, cov)`` of the ``l`` states of interval ``k``."""
        width = self.l * self.n_x
        s = slice((k - 1) * width, k * width)
        return self.mean[s], self.cov[s, s]


def joint_prior(model, N, inputs=None):
    n, l = model.n_x, model.l
    T = N * l
    if T * n > MAX_DIM:
        raise ModelError(f"oracle size N*l*n_x = {T * n} exceeds {MAX_DIM}")
    u = np.zeros((T, model.n_u)) if inputs is None else np.asarray(getattr(inputs, "u", inputs))
    if len(u) < T:
        raise ModelError("inputs too short for the oracle")
    A, Q = model.A, model.Q
    mean = np.empty((T + 1, n))
    cov = np.zeros(((T + 1) * n, (T + 1) * n))
    mean[0] = model.m0
    cov[:n, :n] = model.P0
    for t in range(1, T + 1):
        cur = slice(t * n, (t + 1) * n)
        prev = slice((t - 1) * n, t * n)
        mean[t] = A @ mean[t - 1] + model.B @ u[t - 1]
        # cov(x_t, x_s) = A cov(x_{t-1}, x_s) for s < t
        cov[cur, :t * n] = A @ cov[prev, :t * n]
        cov[:t * n, cur] = cov[cur, :t * n].T
        cov[cur, cur] = A @ cov[prev, prev] @ A.T + Q
    H = np.zeros((N * model.n_y, T * n))
    for k in range(N):
        for i in range(l):
            t = k * l + i
            H[k * model.n_y:(k + 1) * model.n_y, t * n:(t + 1) * n] = model.C / l
    noise = np.kron(np.eye(N), model.R)
    return JointGaussian(mean[1:].reshape(-1), cov[n:, n:], H, noise, n, l)


def _condition(mean, cov, H, noise, y):
    S = H @ cov @ H.T + noise
    try:
        K = np.linalg.solve(S, H @ cov).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular innovation covariance in oracle") from exc
    new_mean = mean + K @ (y - H @ mean)
    new_cov = cov - K @ S @ K.T
    return new_mean, 0.5 * (new_cov + new_cov.T)


def condition_on_measurements(jg, ys, upto=None, *, one_at_a_time=False):
    """Condition on ``y_1 .. y_upto`` (all measurements when ``upto`` is None)."""
    ys = np.asarray(ys, dtype=float).reshape(len(ys), -1)
    ny = ys.shape[1]
    K = len(ys) if upto is None else upto
    if K > jg.H.shape[0] // ny:
        raise ModelError("more measurements than the joint model holds")
    rows = K * ny
    if not one_at_a_time:
        mean, cov = _condition(jg.mean, jg.cov, jg.H[:rows], jg.noise_cov[:rows, :rows],
                               ys[:K].reshape(-1))
    else:
        mean, cov = jg.mean, jg.cov
        for k in range(K):
            s = slice(k * ny, (k + 1) * ny)
            mean, cov = _condition(mean, cov, jg.H[s], jg.noise_cov[s, s], ys[k].reshape(-1))
    return JointGaussian(mean, cov, jg.H, jg.noise_cov, jg.n_x, jg.l)


def filtering_intervals(model, ys, inputs=None):
    """Per interval ``k``: joint ``(mean, cov)`` of its states given ``y_{1:k}``."""
    N = len(ys)
    prior = joint_prior(model, N, inputs)
    return [condition_on_measurements(prior, ys, k).interval(k) for k in range(1, N + 1)]


def smoothing_intervals(model, ys, inputs=None):
    """Per interval ``k``: joint ``(mean, cov)`` of its states given all data."""
    N = len(ys)
    post = condition_on_measurements(joint_prior(model, N, inputs), ys)
    return [post.interval(k) for k in range(1, N + 1)]
