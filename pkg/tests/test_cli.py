import csv
import json

import numpy as np
import pytest

from srtm.bench import TIMING_COLUMNS, n_grid, run_bench
from srtm.cli import main
from srtm.engines import ENGINES, compute_rmse, run_engine
from srtm.errors import ModelError, NumericalError
from srtm.simulation import benchmark_model, simulate

from .conftest import make_case


def test_compute_rmse():
    truth = np.arange(12.0).reshape(2, 3, 2)
    assert compute_rmse(truth, truth) == 0.0
    assert compute_rmse(truth + 0.25, truth) == pytest.approx(0.25)
    with pytest.raises(ModelError):
        compute_rmse(truth[:1], truth)


def test_run_engine_rejects_unknown():
    model, inputs, traj = make_case(0, N=2)
    with pytest.raises(ModelError):
        run_engine("magic", model, traj.measurements, inputs)


def test_sequential_stats_grow_with_n():
    model = benchmark_model(l=4)
    counts = {}
    for N in (5, 10, 20):
        traj = simulate(model, N)
        for e in ("seq_filter", "seq_smooth"):
            est = run_engine(e, model, traj.measurements)
            assert est.stats.depth == N
            counts.setdefault(e, []).append(est.stats.combine_count)
    assert all(np.all(np.diff(c) > 0) for c in counts.values())


def test_n_grid():
    g = n_grid(16, 6000, 10)
    assert g[0] == 16 and g[-1] == 6000 and g == sorted(set(g))
    with pytest.raises(ValueError):
        n_grid(0, 10, 3)


def test_run_bench_records():
    records = run_bench(benchmark_model(l=4), [3, 7], trials=2)
    assert len(records) == 2 * len(ENGINES)
    for r in records:
        assert r.trials == 2 and r.mean_time_s > 0 and np.isfinite(r.rmse)


def test_cli_simulate_and_estimate(tmp_path, capsys):
    traj = tmp_path / "traj.csv"
    assert main(["simulate", "--l", "4", "--n", "1", "--seed", "3", "--inputs", "sine",
                 "--output", str(traj)]) == 0
    outputs = {}
    for engine in ("seq_smooth", "par_smooth"):
        out = tmp_path / f"{engine}.csv"
        assert main(["estimate", "--l", "4", "--trajectory", str(traj), "--engine", engine,
                     "--output", str(out)]) == 0
        outputs[engine] = np.loadtxt(out, delimiter=",", skiprows=1)
    np.testing.assert_allclose(outputs["par_smooth"], outputs["seq_smooth"], rtol=1e-12,
                               atol=1e-14)
    assert "rmse=" in capsys.readouterr().out


def test_cli_bench_columns(tmp_path):
    out = tmp_path / "timing.csv"
    assert main(["bench", "--l", "4", "--n-min", "4", "--n-max", "12", "--points", "3",
                 "--trials", "1", "--output", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == TIMING_COLUMNS
    assert [int(r[0]) for r in rows[1:]] == n_grid(4, 12, 3)
    assert (tmp_path / "timing_records.csv").exists()


def test_cli_accepts_reference_bench_flags():
    from srtm.cli import build_parser
    args = build_parser().parse_args(["bench", "--l", "16", "--n-max", "6000", "--trials", "100",
                                      "--output", "x.csv"])
    assert (args.l, args.n_max, args.trials) == (16, 6000, 100)


def test_cli_verify(capsys):
    assert main(["verify", "--seeds", "20"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_cli_config_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"A": [[1.0, 0.0]], "C": [[1.0]]}))
    assert main(["simulate", "--model", str(bad), "--n", "3", "--output",
                 str(tmp_path / "t.csv")]) == 2
    assert main(["estimate", "--trajectory", str(tmp_path / "missing.csv")]) == 2


def test_cli_numerical_error(tmp_path, capsys):
    model = {"A": [[1.0]], "C": [[1.0]], "Q": [[0.0]], "R": [[0.0]], "m0": [0.0],
             "P0": [[1.0]], "l": 2}
    path = tmp_path / "singular.json"
    path.write_text(json.dumps(model))
    traj = tmp_path / "t.csv"
    assert main(["simulate", "--model", str(path), "--n", "3", "--output", str(traj)]) == 0
    assert main(["estimate", "--model", str(path), "--trajectory", str(traj)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_numerical_error_names_step():
    assert "k=7" in str(NumericalError("solve failed", step=7))
