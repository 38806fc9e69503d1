"""Command-line interface: ``srtm {simulate,estimate,bench,verify}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from ._kernels import available, get_backend
from .bench import n_grid, run_bench, write_records_csv, write_timing_csv
from .engines import ENGINES, compute_rmse, run_engine, write_results_csv
from .errors import ModelError, NumericalError
from .model import InputSequence, load_model
from .simulation import (benchmark_model, read_trajectory_csv, simulate, sinusoidal_inputs,
                         write_trajectory_csv)
from .verify import run_verification

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _add_model_args(p, l_default=None):
    g = p.add_argument_group("model")
    g.add_argument("--model", type=Path, help="JSON model file (default: benchmark model)")
    g.add_argument("--l", type=int, default=l_default, help="samples per measurement interval")
    g.add_argument("--nx", type=int, default=4)
    g.add_argument("--ny", type=int, default=2)
    g.add_argument("--nu", type=int, default=1)
    g.add_argument("--model-seed", type=int, default=0)


def _add_engine_args(p):
    p.add_argument("--workers", type=int, default=None,
                   help="scan worker threads (default: $SRTM_WORKERS or 1)")
    p.add_argument("--backend", choices=["auto", *available()], default="auto",
                   help="combine kernel backend")


def _model_from_args(args):
    inputs = None
    if args.model is not None:
        model, inputs = load_model(args.model)
        if args.l is not None and args.l != model.l:
            model = model.with_l(args.l)
            inputs = None if inputs is None else InputSequence(inputs.u, model.l)
    else:
        model = benchmark_model(args.nx, args.ny, args.nu, args.l or 16, args.model_seed)
    return model, inputs


def cmd_simulate(args):
    model, inputs = _model_from_args(args)
    if args.inputs == "sine":
        inputs = sinusoidal_inputs(model, args.n)
    elif args.inputs == "zero":
        inputs = None
    traj = simulate(model, args.n, inputs, seed=args.seed)
    write_trajectory_csv(args.output, traj)
    print(f"wrote {args.n} intervals (l={model.l}) to {args.output}")
    return EXIT_OK


def cmd_estimate(args):
    model, _ = _model_from_args(args)
    traj = read_trajectory_csv(args.trajectory)
    if traj.l != model.l:
        raise ModelError(f"trajectory has l={traj.l}, model has l={model.l}")
    inputs = None
    if model.n_u:
        if traj.inputs is None or traj.inputs.shape[1] != model.n_u:
            raise ModelError("trajectory does not carry inputs matching the model")
        inputs = InputSequence(traj.inputs, model.l)
    est = run_engine(args.engine, model, traj.measurements, inputs, workers=args.workers,
                     backend=args.backend, full=args.full)
    if args.output is not None:
        write_results_csv(args.output, est)
    print(f"engine={args.engine} N={traj.n_intervals} depth={est.stats.depth} "
          f"rmse={compute_rmse(est, traj):.6g}")
    return EXIT_OK


def cmd_bench(args):
    model, _ = _model_from_args(args)
    grid = n_grid(args.n_min, args.n_max, args.points)
    engines = args.engines.split(",") if args.engines else ENGINES
    for e in engines:
        if e not in ENGINES:
            raise ModelError(f"unknown engine {e!r}")
    backend = get_backend(args.backend)
    print(f"# l={model.l} n_x={model.n_x} kernels={backend.NAME} workers={args.workers or 1} "
          f"trials={args.trials}", file=sys.stderr)

    def progress(r):
        print(f"N={r.n_intervals:6d} {r.engine:10s} mean={r.mean_time_s:.4e}s "
              f"median={r.median_time_s:.4e}s depth={r.depth} rmse={r.rmse:.4f}", file=sys.stderr)

    inputs = sinusoidal_inputs if args.inputs == "sine" else None
    records = run_bench(model, grid, args.trials, seed=args.seed, workers=args.workers,
                        backend=args.backend, engines=engines, inputs=inputs, progress=progress)
    write_timing_csv(args.output, records)
    records_path = args.records or args.output.with_name(args.output.stem + "_records.csv")
    write_records_csv(records_path, records)
    print(f"wrote {args.output} and {records_path}")
    return EXIT_OK


def cmd_verify(args):
    checks = run_verification(args.seeds, args.seed, args.tol, backend=args.backend)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} err={c.error:.3e}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(prog="srtm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a trajectory and write it as CSV")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True, help="number of intervals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inputs", choices=["model", "zero", "sine"], default="model",
                   help="input signal (model: inputs from the config file, else zero)")
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="run one engine on a trajectory CSV")
    _add_model_args(p)
    _add_engine_args(p)
    p.add_argument("--trajectory", type=Path, required=True)
    p.add_argument("--engine", choices=ENGINES, default="par_smooth")
    p.add_argument("--full", action="store_true", help="keep full interval covariances")
    p.add_argument("--output", type=Path, help="results CSV")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bench", help="time all engines over a grid of N")
    _add_model_args(p, l_default=16)
    _add_engine_args(p)
    p.add_argument("--n", type=int, help="single N (sets --n-min and --n-max)")
    p.add_argument("--n-min", type=int, default=16)
    p.add_argument("--n-max", type=int, default=6000)
    p.add_argument("--points", type=int, default=10, help="grid points")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inputs", choices=["zero", "sine"], default="zero")
    p.add_argument("--engines", help="comma-separated subset of engines")
    p.add_argument("--output", type=Path, required=True, help="timing CSV")
    p.add_argument("--records", type=Path, help="per-run records CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check estimators against the brute-force oracle")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--backend", choices=["auto", *available()], default="auto")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "n", None) is not None and args.command == "bench":
        args.n_min = args.n_max = args.n
    try:
        return args.func(args)
    except ModelError as exc:
        print(f"srtm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"srtm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"srtm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
