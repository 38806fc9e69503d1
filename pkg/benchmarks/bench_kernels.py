"""Compare the compiled and pure-numpy combine kernels.

Measures raw combine throughput on batches of random elements and the
end-to-end parallel engines on the benchmark model.

    python3 benchmarks/bench_kernels.py [--n-x 4] [--batch 4096] [--N 2000]
"""

import argparse
import time

import numpy as np

from srtm._kernels import available, get_backend
from srtm.engines import run_engine
from srtm.simulation import benchmark_model, simulate


def _spd(rng, n, batch):
    X = rng.standard_normal((batch, n, n))
    return X @ np.swapaxes(X, -1, -2) / n + 0.1 * np.eye(n)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-x", type=int, default=4)
    p.add_argument("--batch", type=int, default=4096)
    p.add_argument("--N", type=int, default=2000, help="intervals for the engine timing")
    p.add_argument("--l", type=int, default=16)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    rng = np.random.default_rng(0)
    n, b = args.n_x, args.batch
    filt = [rng.standard_normal((b, n, n)) / np.sqrt(n), rng.standard_normal((b, n)),
            _spd(rng, n, b), rng.standard_normal((b, n)), _spd(rng, n, b)]
    filt = filt + [x.copy() for x in filt]
    smooth = [rng.standard_normal((b, n, n)) / np.sqrt(n), rng.standard_normal((b, n)),
              _spd(rng, n, b)]
    smooth = smooth + [x.copy() for x in smooth]

    model = benchmark_model(n_x=n, l=args.l)
    ys = simulate(model, args.N, seed=0).measurements

    print(f"n_x={n} batch={b} N={args.N} l={args.l} backends={available()}")
    print(f"{'backend':10s} {'filter us/op':>13s} {'smoother us/op':>15s} "
          f"{'par_filter s':>13s} {'par_smooth s':>13s}")
    for name in available():
        k = get_backend(name)
        tf = best_of(lambda: k.filter_combine(*filt), args.repeat) / b * 1e6
        ts = best_of(lambda: k.smoother_combine(*smooth), args.repeat) / b * 1e6
        pf = best_of(lambda: run_engine("par_filter", model, ys, backend=name), args.repeat)
        ps = best_of(lambda: run_engine("par_smooth", model, ys, backend=name), args.repeat)
        print(f"{name:10s} {tf:13.3f} {ts:15.3f} {pf:13.4f} {ps:13.4f}")


if __name__ == "__main__":
    main()
