"""The four estimation engines behind one call, plus RMSE and results CSV."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .model import build_batch_model, resolve_inputs
from .scan import ScanStats, parallel_imkf, parallel_ims
from .sequential import (GaussianState, IntervalPosterior, _as_measurements, fast_rate_filter,
                         imkf_filter, ims_expand_intervals, ims_smooth_slow)

ENGINES = ("seq_filter", "seq_smooth", "par_filter", "par_smooth")


@dataclass
class Estimate:
    engine: str
    slow: GaussianState  # x_{k,l} for filters, x_{k,1} for smoothers
    intervals: IntervalPosterior  # fast-rate posteriors
    stats: ScanStats


def run_engine(engine, model, ys, inputs=None, *, workers=None, backend=None, full=False):
    """Run one engine end to end and return fast-rate posteriors.

    Sequential engines run single-threaded; their ``stats`` count one step per
    recursion step, so ``depth`` equals the number of intervals.
    """
    if engine not in ENGINES:
        raise ModelError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    ys = _as_measurements(model, ys)
    N = len(ys)
    inputs = resolve_inputs(model, inputs, N)
    if engine == "par_smooth":
        res = parallel_ims(model, ys, inputs, workers=workers, backend=backend, full=full)
        return Estimate(engine, res.first, res.intervals, res.stats)
    if engine == "par_filter":
        slow, stats = parallel_imkf(model, ys, inputs, workers=workers, backend=backend)
        fast = fast_rate_filter(model, build_batch_model(model), slow, ys, inputs,
                                full=full, workers=workers)
        return Estimate(engine, slow, fast, stats)
    slow = imkf_filter(model, ys, inputs)
    fast = fast_rate_filter(model, build_batch_model(model), slow, ys, inputs,
                            full=full, workers=1)
    if engine == "seq_filter":
        return Estimate(engine, slow, fast, ScanStats(combine_count=N, depth=N))
    first = ims_smooth_slow(model, fast, inputs)
    smoothed = ims_expand_intervals(model, fast, first, inputs, workers=1)
    return Estimate(engine, first, smoothed, ScanStats(combine_count=2 * N - 1, depth=N))


def compute_rmse(estimates, truth):
    """Root-mean-square error over all fast-rate states and components.

    ``estimates`` may be an :class:`IntervalPosterior`, an :class:`Estimate` or
    a mean array; ``truth`` a Trajectory or an array of the same shape.
    """
    if isinstance(estimates, Estimate):
        estimates = estimates.intervals
    if isinstance(estimates, IntervalPosterior):
        estimates = estimates.mean
    est = np.asarray(estimates, dtype=float)
    ref = truth.fast_states() if hasattr(truth, "fast_states") else np.asarray(truth, dtype=float)
    if est.size != ref.size:
        raise ModelError(f"estimate has {est.size} values, truth has {ref.size}")
    return float(np.sqrt(np.mean((est.reshape(ref.shape) - ref) ** 2)))


def write_results_csv(path, estimate):
    """One row per fast-rate step: ``k, i, mean_0.., var_0..`` (marginal variances)."""
    post = estimate.intervals if isinstance(estimate, Estimate) else estimate
    N, l, n = post.mean.shape
    var = np.diagonal(post.diag, axis1=-2, axis2=-1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "i"] + [f"mean_{j}" for j in range(n)] + [f"var_{j}" for j in range(n)])
        for k in range(N):
            for i in range(l):
                w.writerow([k + 1, i + 1] + [repr(float(v)) for v in post.mean[k, i]]
                           + [repr(float(v)) for v in var[k, i]])
