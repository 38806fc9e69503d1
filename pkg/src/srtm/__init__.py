"""Filtering and smoothing for linear-Gaussian models with slow-rate integrated measurements.

Sequential estimators (slow-rate IMKF, batch fast-rate filter, interval
smoother) live in :mod:`srtm.sequential`; their parallel-in-time counterparts
built on an associative scan live in :mod:`srtm.scan`.
"""

__version__ = "0.1.0"

from .engines import ENGINES, Estimate, compute_rmse, run_engine
from .errors import ModelError, NumericalError, SrtmError
from .model import (BatchIntervalModel, InputSequence, LiftedSlowModel, SrtmModel,
                    build_batch_model, lift_slow_model, load_model, save_model, stack_inputs)
from .scan import parallel_imkf, parallel_ims
from .sequential import (GaussianState, IntervalPosterior, fast_rate_filter, imkf_filter,
                         imkf_predict, imkf_update, ims_expand_intervals, ims_smooth_slow)
from .simulation import Trajectory, benchmark_model, simulate

__all__ = [
    "ENGINES", "Estimate", "compute_rmse", "run_engine", "ModelError", "NumericalError",
    "SrtmError", "BatchIntervalModel", "InputSequence", "LiftedSlowModel", "SrtmModel",
    "build_batch_model", "lift_slow_model", "load_model", "save_model", "stack_inputs",
    "parallel_imkf", "parallel_ims", "GaussianState", "IntervalPosterior", "fast_rate_filter",
    "imkf_filter", "imkf_predict", "imkf_update", "ims_expand_intervals", "ims_smooth_slow",
    "Trajectory", "benchmark_model", "simulate",
]
