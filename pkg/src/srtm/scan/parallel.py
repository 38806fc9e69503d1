"""Parallel-in-time filter and smoother built on the associative scan."""

from typing import NamedTuple

from ..model import build_batch_model, lift_slow_model, resolve_inputs
from ..sequential import (GaussianState, IntervalPosterior, _as_measurements,
                          fast_rate_filter, ims_expand_intervals)
from .elements import (combine_filter, combine_smoother, make_filter_elements,
                       make_smoother_elements)
from .engine import ScanStats, associative_scan


class FilterResult(NamedTuple):
    states: GaussianState
    stats: ScanStats


class SmootherResult(NamedTuple):
    first: GaussianState
    intervals: IntervalPosterior
    filtered: IntervalPosterior
    filter_stats: ScanStats
    smoother_stats: ScanStats

    @property
    def stats(self):
        return self.filter_stats.merge(self.smoother_stats)


def parallel_imkf(model, ys, inputs=None, *, workers=None, backend=None):
    """Slow-rate filtering marginals ``p(x_{k,l} | y_{1:k})`` via a forward scan."""
    ys = _as_measurements(model, ys)
    inputs = resolve_inputs(model, inputs, len(ys))
    elems = make_filter_elements(model, lift_slow_model(model), ys, inputs)
    out, stats = associative_scan(lambda a, b: combine_filter(a, b, backend), elems,
                                  workers=workers)
    return FilterResult(GaussianState(out.d, out.D), stats)


def parallel_ims(model, ys, inputs=None, *, workers=None, backend=None, full=True):
    """Smoothed ``x_{k,1}`` via a reverse scan, expanded to every fast-rate state."""
    ys = _as_measurements(model, ys)
    inputs = resolve_inputs(model, inputs, len(ys))
    slow, fstats = parallel_imkf(model, ys, inputs, workers=workers, backend=backend)
    fast = fast_rate_filter(model, build_batch_model(model), slow, ys, inputs,
                            full=full, workers=workers)
    elems = make_smoother_elements(model, fast, inputs)
    out, sstats = associative_scan(lambda a, b: combine_smoother(a, b, backend), elems,
                                   reverse=True, workers=workers)
    first = GaussianState(out.g, out.S)
    intervals = ims_expand_intervals(model, fast, first, inputs, workers=workers)
    return SmootherResult(first, intervals, fast, fstats, sstats)
