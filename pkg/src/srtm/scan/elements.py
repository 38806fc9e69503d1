"""Gaussian scan elements for the slow-rate filter and smoother.

A filter element ``(F, d, D, eta, J)`` parameterises
``p(x_{k,l} | y_k, x_{k-1,l}) = N(F x + d, D)`` together with the likelihood
``p(y_k | x_{k-1,l})`` in information form ``(eta, J)``. A smoother element
``(E, g, S)`` parameterises ``p(x_{k,1} | y_{1:k}, x_{k+1,1}) = N(E x + g, S)``.

Both element types are NamedTuples of arrays; with a leading axis they hold a
whole batch of elements, which is what the scan engine combines.
"""

from typing import NamedTuple

import numpy as np

from .._kernels import get_backend
from ..linalg import right_solve_spd, solve_spd, symmetrize
from ..model import resolve_inputs
from ..sequential import GaussianState, imkf_predict, imkf_update


class FilterElement(NamedTuple):
    F: np.ndarray
    d: np.ndarray
    D: np.ndarray
    eta: np.ndarray
    J: np.ndarray


class SmootherElement(NamedTuple):
    E: np.ndarray
    g: np.ndarray
    S: np.ndarray


def _call_kernel(fn, cls, parts):
    single = parts[0].ndim == 2
    args = [np.ascontiguousarray(p[None] if single else p, dtype=float) for p in parts]
    out = fn(*args)
    return cls._make(o[0] for o in out) if single else cls._make(out)


def combine_filter(a, b, backend=None):
    """``a (x) b`` for filter elements, ``a`` covering the earlier steps."""
    return _call_kernel(get_backend(backend).filter_combine, FilterElement, (*a, *b))


def combine_smoother(a, b, backend=None):
    """``a (x) b`` for smoother elements, ``a`` covering the earlier steps."""
    return _call_kernel(get_backend(backend).smoother_combine, SmootherElement, (*a, *b))


def make_filter_elements(model, lifted, ys, inputs=None):
    """Stacked filter elements for ``k = 1..N``.

    Element 1 absorbs the prior through one ordinary predict/update, so its
    ``F`` is zero and its likelihood part carries no state dependence.
    """
    ys = np.asarray(ys, dtype=float).reshape(-1, model.n_y)
    N, n = len(ys), model.n_x
    ubar = resolve_inputs(model, inputs, N).stacked(N)
    L = lifted
    cross_noise = L.Gbar @ L.Qtilde @ L.Mbar.T
    K = right_solve_spd(cross_noise, L.Rx)
    F = L.Abar - K @ L.Cbar
    D = symmetrize(L.Qbar - K @ cross_noise.T)
    RinvC = solve_spd(L.Rx, L.Cbar)
    J = symmetrize(L.Cbar.T @ RinvC)

    Fs = np.broadcast_to(F, (N, n, n)).copy()
    Ds = np.broadcast_to(D, (N, n, n)).copy()
    Js = np.broadcast_to(J, (N, n, n)).copy()
    ds = ys @ K.T + ubar @ (L.Bbar - K @ L.Dbar).T
    etas = (ys - ubar @ L.Dbar.T) @ RinvC

    prior = GaussianState(model.m0, model.P0)
    first = imkf_update(prior, imkf_predict(prior, L, ubar[0]), L, ubar[0], ys[0], step=1)
    Fs[0], ds[0], Ds[0], etas[0], Js[0] = 0.0, first.mean, first.cov, 0.0, 0.0
    return FilterElement(Fs, ds, Ds, etas, Js)


def make_smoother_elements(model, fast, inputs=None):
    """Stacked smoother elements for ``k = 1..N`` from fast-rate filtering results.

    Uses the filtering means of ``x_{k,1}`` and ``x_{k,l}``, their covariances
    and the cross-covariance ``cov(x_{k,1}, x_{k,l})``. The last element is the
    filtering marginal of ``x_{N,1}`` with ``E = 0``.
    """
    N, n = len(fast), fast.n_x
    A, B, Q = model.A, model.B, model.Q
    u_last = resolve_inputs(model, inputs, N).last_of_intervals(N)
    first, last = fast.first(), fast.last()
    cross = fast.cross_first_last()[:-1]
    E = np.zeros((N, n, n))
    g = first.mean.copy()
    S = first.cov.copy()
    if N > 1:
        P_pred = symmetrize(A @ last.cov[:-1] @ A.T + Q)
        # E = P_{1l} A^T P_pred^{-1}; A P_{l1} = (P_{1l} A^T)^T
        AP_l1 = A @ np.swapaxes(cross, -1, -2)
        Ek = np.swapaxes(solve_spd(P_pred, AP_l1), -1, -2)
        m_pred = last.mean[:-1] @ A.T + u_last @ B.T
        E[:-1] = Ek
        g[:-1] = first.mean[:-1] - (Ek @ m_pred[..., None])[..., 0]
        S[:-1] = symmetrize(first.cov[:-1] - Ek @ AP_l1)
    return SmootherElement(E, g, S)
