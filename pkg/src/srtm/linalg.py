"""Small dense linear-algebra helpers shared by all estimators."""

import warnings

import numpy as np

from .errors import NumericalError, NumericalWarning


def symmetrize(x):
    """Return ``(x + x^T) / 2`` over the last two axes."""
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def solve_spd(S, B, step=None):
    """Solve ``S X = B`` for symmetric positive definite ``S``.

    Broadcasts over leading axes like :func:`numpy.linalg.solve`. A Cholesky
    factorization asserts positive definiteness first; if it fails the solve
    falls back to LU and emits a :class:`NumericalWarning`.
    """
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        warnings.warn("matrix is not positive definite; falling back to LU",
                      NumericalWarning, stacklevel=2)
    try:
        X = np.linalg.solve(S, B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular system: {exc}", step) from exc
    if not np.all(np.isfinite(X)):
        raise NumericalError("non-finite solution", step)
    return X


def right_solve_spd(B, S, step=None):
    """Return ``B S^{-1}`` for symmetric positive definite ``S``."""
    return np.swapaxes(solve_spd(S, np.swapaxes(B, -1, -2), step), -1, -2)


def matrix_powers(A, count):
    """Return ``[A^0, A^1, ..., A^count]`` stacked, by repeated multiplication."""
    n = A.shape[0]
    out = np.empty((count + 1, n, n))
    out[0] = np.eye(n)
    for i in range(1, count + 1):
        out[i] = out[i - 1] @ A
    return out


def rel_err(a, b):
    """Frobenius-norm relative error of ``a`` against reference ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = np.linalg.norm(a - b)
    ref = np.linalg.norm(b)
    return diff / ref if ref > 0 else diff
