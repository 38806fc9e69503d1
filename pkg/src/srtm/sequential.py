"""Sequential filtering and smoothing for slow-rate integrated measurements.

The slow-rate filter (IMKF) and the slow-rate smoother are plain recursions
over intervals. The fast-rate filter and the interval expansion of the
smoother treat intervals independently; they are vectorised over intervals
and may be split across a worker pool.

Interval covariances are handled as ``n_x x n_x`` blocks ``(i, j)``. In full
mode every block is computed; in reduced mode only the diagonal blocks and
the last block column ``(i, l)`` (plus its transpose) are, which is all the
smoother needs. Both modes run the same per-block arithmetic, so the shared
blocks are bit-identical.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .config import default_workers
from .errors import ModelError, NumericalError
from .linalg import right_solve_spd, solve_spd, symmetrize
from .model import lift_slow_model, resolve_inputs


class GaussianState(NamedTuple):
    """Mean and covariance; stacked over steps when arrays carry a leading axis."""

    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class IntervalPosterior:
    """Joint Gaussian over the ``l`` states of every interval, stacked over ``N`` intervals.

    ``mean`` is ``(N, l, n_x)``; ``diag[k, i]`` is block ``(i, i)`` and
    ``last_col[k, i]`` block ``(i, l)`` of the interval covariance. ``cov`` holds
    the full ``(N, l*n_x, l*n_x)`` covariance, or ``None`` in reduced mode.
    """

    mean: np.ndarray
    diag: np.ndarray
    last_col: np.ndarray
    cov: Optional[np.ndarray] = None

    def __len__(self):
        return self.mean.shape[0]

    @property
    def l(self):
        return self.mean.shape[1]

    @property
    def n_x(self):
        return self.mean.shape[2]

    @property
    def full(self):
        return self.cov is not None

    def marginals(self):
        return GaussianState(self.mean, self.diag)

    def first(self):
        return GaussianState(self.mean[:, 0], self.diag[:, 0])

    def last(self):
        return GaussianState(self.mean[:, -1], self.diag[:, -1])

    def cross_first_last(self):
        """Cross-covariance blocks ``cov(x_{k,1}, x_{k,l})``."""
        return self.last_col[:, 0]

    def interval(self, k):
        """Flattened ``(mean, cov)`` of interval ``k`` (0-based); full mode only."""
        if self.cov is None:
            raise ValueError("full interval covariance not stored (reduced mode)")
        return self.mean[k].reshape(-1), self.cov[k]

    def block(self, i, j):
        """Covariance block ``(i, j)`` (0-based) for every interval."""
        l = self.l
        if self.cov is not None:
            n = self.n_x
            return self.cov[:, i * n:(i + 1) * n, j * n:(j + 1) * n]
        if i == j:
            return self.diag[:, i]
        if j == l - 1:
            return self.last_col[:, i]
        if i == l - 1:
            return np.swapaxes(self.last_col[:, j], -1, -2)
        raise ValueError(f"block ({i}, {j}) not stored in reduced mode")

    def take(self, idx):
        cov = None if self.cov is None else self.cov[idx]
        return IntervalPosterior(self.mean[idx], self.diag[idx], self.last_col[idx], cov)


class _Pairs(NamedTuple):
    rows: np.ndarray
    cols: np.ndarray
    transpose: np.ndarray  # position of pair (j, i) for pair (i, j)
    diag: np.ndarray
    last_col: np.ndarray


def _block_pairs(l, full):
    if full:
        rows, cols = np.divmod(np.arange(l * l), l)
    else:
        keep = sorted({(i, i) for i in range(l)} | {(i, l - 1) for i in range(l)}
                      | {(l - 1, i) for i in range(l)})
        rows, cols = (np.array(x) for x in zip(*keep))
    where = {(int(i), int(j)): p for p, (i, j) in enumerate(zip(rows, cols))}
    return _Pairs(rows, cols,
                  np.array([where[(int(j), int(i))] for i, j in zip(rows, cols)]),
                  np.array([where[(i, i)] for i in range(l)]),
                  np.array([where[(i, l - 1)] for i in range(l)]))


def _finish(mean, blocks, pairs, full):
    """Symmetrize pair blocks and pack them into an IntervalPosterior."""
    blocks = 0.5 * (blocks + np.swapaxes(blocks[:, pairs.transpose], -1, -2))
    cov = None
    if full:
        N, _, n, _ = blocks.shape
        l = mean.shape[1]
        cov = blocks.reshape(N, l, l, n, n).transpose(0, 1, 3, 2, 4).reshape(N, l * n, l * n)
    return IntervalPosterior(mean, blocks[:, pairs.diag], blocks[:, pairs.last_col], cov)


def _pair_blocks(post, pairs):
    return np.stack([post.block(i, j) for i, j in zip(pairs.rows, pairs.cols)], axis=1)


def _map_intervals(fn, n_items, workers):
    """Run ``fn(slice)`` over contiguous interval chunks and concatenate."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or n_items < 2:
        return [fn(slice(0, n_items))]
    bounds = np.linspace(0, n_items, min(workers, n_items) + 1).astype(int)
    chunks = [slice(s, e) for s, e in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return list(pool.map(fn, chunks))


def _concat_posteriors(parts):
    if len(parts) == 1:
        return parts[0]
    cov = None if parts[0].cov is None else np.concatenate([p.cov for p in parts])
    return IntervalPosterior(np.concatenate([p.mean for p in parts]),
                             np.concatenate([p.diag for p in parts]),
                             np.concatenate([p.last_col for p in parts]), cov)


def _as_measurements(model, ys):
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 1:
        ys = ys.reshape(-1, model.n_y)
    if ys.ndim != 2 or ys.shape[1] != model.n_y:
        raise ModelError(f"measurements must have shape (N, {model.n_y}), got {ys.shape}")
    if len(ys) < 1:
        raise ModelError("need at least one measurement")
    return ys


# ---------------------------------------------------------------- slow-rate filter

def _cross_noise(lifted):
    return lifted.Gbar @ lifted.Qtilde @ lifted.Mbar.T


def imkf_predict(prev, lifted, ubar):
    m = lifted.Abar @ prev.mean + lifted.Bbar @ ubar
    P = symmetrize(lifted.Abar @ prev.cov @ lifted.Abar.T + lifted.Qbar)
    return GaussianState(m, P)


def imkf_update(prev, pred, lifted, ubar, y, *, step=None, cross_noise=None):
    """Condition the predicted ``x_{k,l}`` on ``y_k``.

    The measurement shares process noise with the prediction, so the gain
    uses ``Abar P Cbar^T + Gbar Qtilde Mbar^T`` rather than ``P^- H^T``.
    """
    if cross_noise is None:
        cross_noise = _cross_noise(lifted)
    P = prev.cov
    cross = lifted.Abar @ P @ lifted.Cbar.T + cross_noise
    S = symmetrize(lifted.Cbar @ P @ lifted.Cbar.T + lifted.Rx)
    L = right_solve_spd(cross, S, step)
    innovation = y - lifted.Cbar @ prev.mean - lifted.Dbar @ ubar
    m = pred.mean + L @ innovation
    P_new = symmetrize(pred.cov - L @ cross.T)
    return GaussianState(m, P_new)


def imkf_filter(model, ys, inputs=None, lifted=None):
    """Slow-rate filtering marginals ``p(x_{k,l} | y_{1:k})`` for ``k = 1..N``, stacked."""
    ys = _as_measurements(model, ys)
    N = len(ys)
    ubar = resolve_inputs(model, inputs, N).stacked(N)
    lifted = lift_slow_model(model) if lifted is None else lifted
    cross_noise = _cross_noise(lifted)
    state = GaussianState(model.m0, model.P0)
    means = np.empty((N, model.n_x))
    covs = np.empty((N, model.n_x, model.n_x))
    for k in range(N):
        pred = imkf_predict(state, lifted, ubar[k])
        state = imkf_update(state, pred, lifted, ubar[k], ys[k], step=k + 1,
                            cross_noise=cross_noise)
        means[k], covs[k] = state
    return GaussianState(means, covs)


# ---------------------------------------------------------------- fast-rate filter

def fast_rate_filter(model, batch, slow, ys, inputs=None, *, full=True, workers=None):
    """Filtering posteriors of all states of every interval.

    ``slow`` holds the slow-rate filtering marginals ``x_{k,l}``, ``k = 1..N``;
    interval ``k`` starts from entry ``k - 1`` (the prior for ``k = 1``).
    Intervals are independent, so they may be processed by ``workers`` threads.
    """
    ys = _as_measurements(model, ys)
    N, l, n, ny = len(ys), model.l, model.n_x, model.n_y
    ubar = resolve_inputs(model, inputs, N).stacked(N)
    m_prev = np.concatenate([model.m0[None], np.asarray(slow.mean)[:N - 1]])
    P_prev = np.concatenate([model.P0[None], np.asarray(slow.cov)[:N - 1]])

    pairs = _block_pairs(l, full)
    Apow = batch.calA.reshape(l, n, n)
    AT = np.swapaxes(Apow, -1, -2)
    Cbar = batch.H @ batch.calA
    GQG = batch.calG @ np.kron(np.eye(l), model.Q) @ batch.calG.T
    HGQG = (batch.H @ GQG).reshape(ny, l, n).transpose(1, 0, 2)
    Rx = batch.H @ GQG @ batch.H.T + model.R
    GQG_pairs = GQG.reshape(l, n, l, n).transpose(0, 2, 1, 3)[pairs.rows, pairs.cols]

    def run(sl):
        m, P, u, y = m_prev[sl], P_prev[sl], ubar[sl], ys[sl]
        M_pred = (Apow @ m[:, None, :, None])[..., 0] + (u @ batch.calB.T).reshape(-1, l, n)
        W = Apow @ P[:, None]
        blocks = W[:, pairs.rows] @ AT[pairs.cols] + GQG_pairs
        CP = Cbar @ P
        HP = CP[:, None] @ AT + HGQG
        S = symmetrize(CP @ Cbar.T + Rx)
        try:
            Z = solve_spd(S[:, None], HP)
        except NumericalError as exc:
            raise NumericalError(f"fast-rate innovation solve failed: {exc}") from exc
        innovation = y - M_pred.reshape(len(m), l * n) @ batch.H.T
        mean = M_pred + np.einsum("kiyx,ky->kix", Z, innovation)
        # rank-n_y downdate, elementwise so every block is computed identically
        for r in range(ny):
            blocks = blocks - Z[:, pairs.rows, r, :, None] * HP[:, pairs.cols, r, None, :]
        return _finish(mean, blocks, pairs, full)

    return _concat_posteriors(_map_intervals(run, N, workers))


# ---------------------------------------------------------------- smoother

def ims_smooth_slow(model, fast, inputs=None):
    """Backward pass for the first state of every interval, ``p(x_{k,1} | y_{1:N})``.

    Given ``x_{k+1,1}`` the states of interval ``k`` are independent of later
    data, so the recursion runs on ``x_{k,1}`` using the filtering
    cross-covariance between the first and last state of each interval.
    """
    N = len(fast)
    A, B, Q = model.A, model.B, model.Q
    u_last = resolve_inputs(model, inputs, N).last_of_intervals(N)
    first, last = fast.first(), fast.last()
    cross = fast.cross_first_last()
    means = np.empty((N, model.n_x))
    covs = np.empty((N, model.n_x, model.n_x))
    means[-1], covs[-1] = first.mean[-1], first.cov[-1]
    for k in range(N - 2, -1, -1):
        m_pred = A @ last.mean[k] + B @ u_last[k]
        P_pred = symmetrize(A @ last.cov[k] @ A.T + Q)
        G = right_solve_spd(cross[k] @ A.T, P_pred, step=k + 1)
        means[k] = first.mean[k] + G @ (means[k + 1] - m_pred)
        covs[k] = symmetrize(first.cov[k] + G @ (covs[k + 1] - P_pred) @ G.T)
    return GaussianState(means, covs)


def ims_expand_intervals(model, fast, smoothed_first, inputs=None, *, workers=None):
    """Smoothed posteriors of all states of every interval.

    ``smoothed_first`` holds ``p(x_{k,1} | y_{1:N})`` for ``k = 1..N``; interval
    ``k < N`` is corrected with entry ``k + 1``. The last interval has no later
    data and keeps its filtering posterior.
    """
    N, l = len(fast), fast.l
    A, B, Q = model.A, model.B, model.Q
    u_last = resolve_inputs(model, inputs, N).last_of_intervals(N)
    pairs = _block_pairs(l, fast.full)
    ms_next = np.asarray(smoothed_first.mean)[1:]
    Ps_next = np.asarray(smoothed_first.cov)[1:]

    def run(sl):
        part = fast.take(sl)
        m_pred = part.mean[:, -1] @ A.T + u_last[sl] @ B.T
        P_pred = symmetrize(A @ part.diag[:, -1] @ A.T + Q)
        # G_i = P^f_{i,l} A^T P_pred^{-1}
        GT = solve_spd(P_pred[:, None], A @ np.swapaxes(part.last_col, -1, -2))
        G = np.swapaxes(GT, -1, -2)
        mean = part.mean + (G @ (ms_next[sl] - m_pred)[:, None, :, None])[..., 0]
        dP = Ps_next[sl] - P_pred
        blocks = _pair_blocks(part, pairs) + (G[:, pairs.rows] @ dP[:, None]) @ GT[:, pairs.cols]
        return _finish(mean, blocks, pairs, fast.full)

    parts = _map_intervals(run, N - 1, workers) if N > 1 else []
    return _concat_posteriors(parts + [fast.take(slice(N - 1, N))])
