"""Oracle-equivalence checks on small random instances (used by ``srtm verify``)."""

from dataclasses import dataclass

import numpy as np

from .engines import run_engine
from .linalg import rel_err
from .model import build_batch_model
from .oracle import filtering_intervals, smoothing_intervals
from .sequential import fast_rate_filter, imkf_filter, ims_expand_intervals, ims_smooth_slow
from .simulation import random_model, simulate, sinusoidal_inputs


@dataclass
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tol)


def random_instance(seed, *, l_choices=(1, 2, 3, 5), max_n=8, max_nx=4, max_ny=2):
    rng = np.random.default_rng(seed)
    l = int(rng.choice(l_choices))
    N = int(rng.integers(1, max_n + 1))
    model = random_model(rng, int(rng.integers(1, max_nx + 1)), int(rng.integers(1, max_ny + 1)),
                         int(rng.integers(0, 3)), l)
    inputs = sinusoidal_inputs(model, N, period=float(rng.uniform(5, 30)))
    traj = simulate(model, N, inputs, seed=seed)
    return model, inputs, traj


def oracle_errors(model, inputs, ys):
    """Worst relative errors of the sequential estimators against the oracle.

    Returns a dict with keys ``imkf``, ``fast_filter``, ``cross_1l``,
    ``slow_smoother`` and ``interval_smoother``.
    """
    n = model.n_x
    slow = imkf_filter(model, ys, inputs)
    fast = fast_rate_filter(model, build_batch_model(model), slow, ys, inputs, full=True)
    first = ims_smooth_slow(model, fast, inputs)
    smoothed = ims_expand_intervals(model, fast, first, inputs)
    err = dict.fromkeys(("imkf", "fast_filter", "cross_1l", "slow_smoother",
                         "interval_smoother"), 0.0)
    for k, ((mf, Pf), (ms, Ps)) in enumerate(zip(filtering_intervals(model, ys, inputs),
                                                  smoothing_intervals(model, ys, inputs))):
        err["imkf"] = max(err["imkf"], rel_err(slow.mean[k], mf[-n:]),
                          rel_err(slow.cov[k], Pf[-n:, -n:]))
        err["fast_filter"] = max(err["fast_filter"], rel_err(fast.mean[k].ravel(), mf),
                                 rel_err(fast.cov[k], Pf))
        err["cross_1l"] = max(err["cross_1l"], rel_err(fast.cross_first_last()[k], Pf[:n, -n:]))
        err["slow_smoother"] = max(err["slow_smoother"], rel_err(first.mean[k], ms[:n]),
                                   rel_err(first.cov[k], Ps[:n, :n]))
        err["interval_smoother"] = max(err["interval_smoother"],
                                       rel_err(smoothed.mean[k].ravel(), ms),
                                       rel_err(smoothed.cov[k], Ps))
    return err


def parallel_errors(model, inputs, ys, *, workers=1, backend=None):
    """Relative differences between parallel and sequential engines."""
    out = {}
    for seq, par in (("seq_filter", "par_filter"), ("seq_smooth", "par_smooth")):
        a = run_engine(seq, model, ys, inputs, full=True)
        b = run_engine(par, model, ys, inputs, workers=workers, backend=backend, full=True)
        out[par] = max(rel_err(b.slow.mean, a.slow.mean), rel_err(b.slow.cov, a.slow.cov),
                       rel_err(b.intervals.mean, a.intervals.mean),
                       rel_err(b.intervals.cov, a.intervals.cov))
    return out


def run_verification(seeds=20, base_seed=0, tol=1e-8, backend=None):
    checks = []
    for s in range(base_seed, base_seed + seeds):
        model, inputs, traj = random_instance(s)
        tag = f"seed={s} l={model.l} N={traj.n_intervals} n_x={model.n_x}"
        for name, e in oracle_errors(model, inputs, traj.measurements).items():
            checks.append(Check(f"oracle/{name} [{tag}]", e, tol))
        for name, e in parallel_errors(model, inputs, traj.measurements,
                                       backend=backend).items():
            checks.append(Check(f"{name}==seq [{tag}]", e, tol))
    return checks
