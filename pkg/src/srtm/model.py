"""Model definition for slow-rate integrated measurements and its lifted forms.

The fast-rate dynamics are ``x_{t+1} = A x_t + B u_t + w_t`` and every ``l``
fast samples one measurement ``y_k = (C / l) * sum_{i=1..l} x_{k,i} + v_k``
arrives. Fast time ``t`` maps to interval coordinates by
``t = (k - 1) * l + i`` with ``x_{0,l} = x_0``.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .errors import ModelError, NumericalError
from .linalg import matrix_powers, symmetrize


def _matrix(name, value, rows=None, cols=None):
    arr = np.array(value, dtype=float)
    if arr.ndim != 2:
        raise ModelError(f"{name} must be a matrix, got shape {arr.shape}")
    if rows is not None and arr.shape[0] != rows:
        raise ModelError(f"{name} has {arr.shape[0]} rows, expected {rows}")
    if cols is not None and arr.shape[1] != cols:
        raise ModelError(f"{name} has {arr.shape[1]} columns, expected {cols}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} contains non-finite values")
    return arr


def _check_psd(name, M, tol=1e-10):
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        raise ModelError(f"{name} is not symmetric")
    scale = max(1.0, np.abs(M).max())
    if np.linalg.eigvalsh(M).min() < -tol * scale:
        raise ModelError(f"{name} is not positive semidefinite")


@dataclass(frozen=True)
class SrtmModel:
    """Time-invariant linear-Gaussian model with integrated measurements.

    ``B`` may be omitted (no inputs). ``R`` is only required to be PSD here so
    that noiseless simulations can be expressed; estimators fail with a
    :class:`NumericalError` if the innovation covariance turns out singular.
    """

    A: np.ndarray
    C: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    m0: np.ndarray
    P0: np.ndarray
    l: int
    B: Optional[np.ndarray] = None

    def __post_init__(self):
        A = _matrix("A", self.A)
        n = A.shape[0]
        if A.shape[1] != n:
            raise ModelError("A must be square")
        C = _matrix("C", self.C, cols=n)
        ny = C.shape[0]
        B = np.zeros((n, 0)) if self.B is None else _matrix("B", self.B, rows=n)
        Q = _matrix("Q", self.Q, n, n)
        R = _matrix("R", self.R, ny, ny)
        P0 = _matrix("P0", self.P0, n, n)
        m0 = np.array(self.m0, dtype=float).reshape(-1)
        if m0.shape != (n,):
            raise ModelError(f"m0 has length {m0.size}, expected {n}")
        if int(self.l) != self.l or self.l < 1:
            raise ModelError(f"l must be a positive integer, got {self.l!r}")
        for name, M in (("Q", Q), ("R", R), ("P0", P0)):
            _check_psd(name, M)
        for name, value in (("A", A), ("B", B), ("C", C), ("Q", Q), ("R", R),
                            ("m0", m0), ("P0", P0)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "l", int(self.l))

    @property
    def n_x(self):
        return self.A.shape[0]

    @property
    def n_y(self):
        return self.C.shape[0]

    @property
    def n_u(self):
        return self.B.shape[1]

    def with_l(self, l):
        return SrtmModel(A=self.A, B=self.B, C=self.C, Q=self.Q, R=self.R,
                         m0=self.m0, P0=self.P0, l=l)

    def to_dict(self):
        return {"A": self.A.tolist(), "B": self.B.tolist(), "C": self.C.tolist(),
                "Q": self.Q.tolist(), "R": self.R.tolist(), "m0": self.m0.tolist(),
                "P0": self.P0.tolist(), "l": self.l}

    @classmethod
    def from_dict(cls, cfg):
        missing = [k for k in ("A", "C", "Q", "R", "m0", "P0", "l") if k not in cfg]
        if missing:
            raise ModelError(f"missing model fields: {', '.join(missing)}")
        B = cfg.get("B")
        if B is not None and len(B) and not np.ndim(B[0]):
            B = [[b] for b in B]
        return cls(A=cfg["A"], B=B, C=cfg["C"], Q=cfg["Q"], R=cfg["R"],
                   m0=cfg["m0"], P0=cfg["P0"], l=cfg["l"])


class LiftedSlowModel(NamedTuple):
    """Interval-level dynamics and measurement of the slow-rate state ``x_{k,l}``."""

    Abar: np.ndarray
    Bbar: np.ndarray
    Gbar: np.ndarray
    Qtilde: np.ndarray
    Qbar: np.ndarray
    Cbar: np.ndarray
    Dbar: np.ndarray
    Mbar: np.ndarray
    Rx: np.ndarray


class BatchIntervalModel(NamedTuple):
    """Stacked representation of all ``l`` states of one interval."""

    calA: np.ndarray
    calG: np.ndarray
    calB: np.ndarray
    H: np.ndarray
    Ahat: np.ndarray


@dataclass(frozen=True)
class InputSequence:
    """Fast-rate inputs ``u_t`` stored flat, row ``t`` for ``t = 0, 1, ...``.

    In interval coordinates ``u_{k,i}`` is row ``(k - 1) * l + i``, so
    ``u_{0,l}`` (the input applied at the prior state) is row 0.
    """

    u: np.ndarray
    l: int

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim == 1:
            u = u.reshape(-1, 1)
        if u.ndim != 2:
            raise ModelError(f"inputs must be a 2-D array, got shape {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @classmethod
    def zeros(cls, n_u, l, n_intervals):
        return cls(np.zeros((n_intervals * l + 1, n_u)), l)

    @property
    def n_u(self):
        return self.u.shape[1]

    def at(self, k, i):
        t = (k - 1) * self.l + i
        if not 1 <= i <= self.l or t < 0 or t >= len(self.u):
            raise ModelError(f"missing input u_({k},{i})")
        return self.u[t]

    def stacked(self, n_intervals):
        """All stacked interval inputs ``ubar_k`` for ``k = 1..N`` as ``(N, l * n_u)``."""
        need = n_intervals * self.l
        if len(self.u) < need:
            raise ModelError(f"inputs cover {len(self.u)} fast steps, need {need}")
        return self.u[:need].reshape(n_intervals, self.l * self.n_u)

    def last_of_intervals(self, n_intervals):
        """``u_{k,l}`` for ``k = 1..N-1`` (inputs driving ``x_{k,l} -> x_{k+1,1}``)."""
        if n_intervals > 1 and len(self.u) <= (n_intervals - 1) * self.l:
            raise ModelError(f"missing input u_({n_intervals - 1},{self.l})")
        return self.u[self.l * np.arange(1, n_intervals)]


def resolve_inputs(model, inputs, n_intervals):
    """Validate ``inputs`` against ``model``; ``None`` means all-zero inputs."""
    if inputs is None:
        return InputSequence.zeros(model.n_u, model.l, n_intervals)
    if not isinstance(inputs, InputSequence):
        inputs = InputSequence(np.asarray(inputs, dtype=float).reshape(-1, model.n_u), model.l)
    if inputs.l != model.l:
        raise ModelError(f"inputs built for l={inputs.l}, model has l={model.l}")
    if inputs.n_u != model.n_u:
        raise ModelError(f"inputs have {inputs.n_u} channels, model has {model.n_u}")
    return inputs


def stack_inputs(seq, k):
    """Return ``ubar_k = [u_{k-1,l}, u_{k,1}, ..., u_{k,l-1}]`` flattened."""
    if k < 1:
        raise ModelError(f"interval index must be >= 1, got {k}")
    blocks = [seq.at(k - 1, seq.l)] + [seq.at(k, i) for i in range(1, seq.l)]
    return np.concatenate(blocks)


def lift_slow_model(model):
    A, B, C, Q, R, l = model.A, model.B, model.C, model.Q, model.R, model.l
    n = model.n_x
    pw = matrix_powers(A, l)
    # cumulative[m] = sum_{i=0..m} A^i
    cumulative = np.cumsum(pw, axis=0)
    # block j (0-based) of Gbar is A^{l-1-j}, of Mbar is (C/l) sum_{i<l-j} A^i
    Gbar = np.hstack([pw[l - 1 - j] for j in range(l)])
    Mbar = np.hstack([C @ cumulative[l - 1 - j] for j in range(l)]) / l
    Bbar = np.hstack([pw[l - 1 - j] @ B for j in range(l)])
    Dbar = np.hstack([C @ cumulative[l - 1 - j] @ B for j in range(l)]) / l
    Qtilde = np.kron(np.eye(l), Q)
    Qbar = symmetrize(Gbar @ Qtilde @ Gbar.T)
    Cbar = C @ (cumulative[l] - pw[0]) / l
    Rx = symmetrize(Mbar @ Qtilde @ Mbar.T + R)
    try:
        np.linalg.cholesky(Rx)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("lifted measurement covariance Rx is not positive definite") from exc
    assert Gbar.shape == (n, l * n)
    return LiftedSlowModel(Abar=pw[l], Bbar=Bbar, Gbar=Gbar, Qtilde=Qtilde, Qbar=Qbar,
                           Cbar=Cbar, Dbar=Dbar, Mbar=Mbar, Rx=Rx)


def build_batch_model(model):
    A, B, C, l = model.A, model.B, model.C, model.l
    n, nu = model.n_x, model.n_u
    pw = matrix_powers(A, l)
    calA = np.vstack(pw[1:])
    calG = np.zeros((l * n, l * n))
    calB = np.zeros((l * n, l * nu))
    for i in range(l):
        for j in range(i + 1):
            calG[i * n:(i + 1) * n, j * n:(j + 1) * n] = pw[i - j]
            calB[i * n:(i + 1) * n, j * nu:(j + 1) * nu] = pw[i - j] @ B
    H = np.hstack([C] * l) / l
    Ahat = np.zeros((n, l * n))
    Ahat[:, (l - 1) * n:] = A
    return BatchIntervalModel(calA=calA, calG=calG, calB=calB, H=H, Ahat=Ahat)


def load_model(path):
    """Read a JSON model file; returns ``(model, inputs_or_None)``."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ModelError("model file must contain a JSON object")
    model = SrtmModel.from_dict(cfg)
    inputs = None
    if cfg.get("inputs") is not None:
        inputs = InputSequence(np.array(cfg["inputs"], dtype=float).reshape(-1, model.n_u), model.l)
    return model, inputs


def save_model(path, model, inputs=None):
    cfg = model.to_dict()
    if inputs is not None:
        cfg["inputs"] = inputs.u.tolist()
    Path(path).write_text(json.dumps(cfg, indent=2))
