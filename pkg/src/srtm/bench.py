"""Run-time / scan-depth benchmark over a geometric grid of interval counts."""

import csv
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .engines import ENGINES, compute_rmse, run_engine
from .simulation import simulate

TIMING_COLUMNS = ("lengths_space", "gpu_par_filter_mean_times", "gpu_par_smooth_mean_times",
                  "gpu_seq_filter_mean_times", "gpu_seq_smooth_mean_times")


@dataclass
class RunRecord:
    n_intervals: int
    engine: str
    mean_time_s: float
    std_time_s: float
    median_time_s: float
    trials: int
    depth: int
    combine_count: int
    rmse: Optional[float] = None


def n_grid(n_min, n_max, points):
    """Geometrically spaced, de-duplicated integer grid including both ends."""
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"invalid grid bounds [{n_min}, {n_max}]")
    return sorted({int(round(v)) for v in np.geomspace(n_min, n_max, max(points, 1))}
                  | {n_min, n_max})


def time_engine(engine, model, traj, trials, *, workers=None, backend=None):
    """Time ``trials`` runs after one discarded warm-up run."""
    ys, inputs = traj.measurements, traj.inputs
    est = run_engine(engine, model, ys, inputs, workers=workers, backend=backend)
    times = []
    for _ in range(trials):
        t0 = time.perf_counter()
        run_engine(engine, model, ys, inputs, workers=workers, backend=backend)
        times.append(time.perf_counter() - t0)
    return RunRecord(
        n_intervals=len(ys), engine=engine,
        mean_time_s=statistics.fmean(times),
        std_time_s=statistics.pstdev(times) if len(times) > 1 else 0.0,
        median_time_s=statistics.median(times), trials=trials,
        depth=est.stats.depth, combine_count=est.stats.combine_count,
        rmse=compute_rmse(est, traj))


def run_bench(model, n_values, trials=10, *, seed=0, workers=None, backend=None,
              engines=ENGINES, inputs=None, progress=None):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records = []
    for N in n_values:
        traj = simulate(model, N, None if inputs is None else inputs(model, N), seed=seed)
        for engine in engines:
            rec = time_engine(engine, model, traj, trials, workers=workers, backend=backend)
            records.append(rec)
            if progress is not None:
                progress(rec)
    return records


def write_timing_csv(path, records):
    """Wide timing table: one row per N, one mean-time column per engine."""
    by_n = {}
    for r in records:
        by_n.setdefault(r.n_intervals, {})[r.engine] = r.mean_time_s
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TIMING_COLUMNS)
        for N in sorted(by_n):
            row = by_n[N]
            w.writerow([N] + [repr(row[e]) if e in row else "" for e in
                              ("par_filter", "par_smooth", "seq_filter", "seq_smooth")])


def write_records_csv(path, records):
    fields = list(RunRecord.__dataclass_fields__)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in records:
            w.writerow(asdict(r))
