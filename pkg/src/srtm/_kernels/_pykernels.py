"""Pure numpy combine kernels (fallback when the compiled module is absent).

Both functions take batched operands: every array carries a leading batch
axis, so one call combines many element pairs at once.
"""

import numpy as np

from ..errors import NumericalError

NAME = "python"


def _sym(x):
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def _solve(M, rhs):
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular (I + D_i J_j) in filter combine") from exc


def filter_combine(Fi, di, Di, etai, Ji, Fj, dj, Dj, etaj, Jj):
    n = Fi.shape[-1]
    eye = np.eye(n)
    M = eye + Di @ Jj
    Mt = eye + Jj @ Di
    rhs = np.concatenate([Fi, Di, (di + (Di @ etaj[..., None])[..., 0])[..., None]], axis=-1)
    X = _solve(M, rhs)
    Y = _solve(Mt, np.concatenate([Jj, (etaj - (Jj @ di[..., None])[..., 0])[..., None]], axis=-1))
    FjT = np.swapaxes(Fj, -1, -2)
    FiT = np.swapaxes(Fi, -1, -2)
    F = Fj @ X[..., :n]
    d = (Fj @ X[..., 2 * n:])[..., 0] + dj
    D = _sym(Fj @ X[..., n:2 * n] @ FjT + Dj)
    eta = (FiT @ Y[..., n:])[..., 0] + etai
    J = _sym(FiT @ Y[..., :n] @ Fi + Ji)
    return F, d, D, eta, J


def smoother_combine(Ei, gi, Si, Ej, gj, Sj):
    E = Ei @ Ej
    g = (Ei @ gj[..., None])[..., 0] + gi
    S = _sym(Ei @ Sj @ np.swapaxes(Ei, -1, -2) + Si)
    return E, g, S
