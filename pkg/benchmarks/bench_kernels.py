"""Compare the numba and pure-numpy kernels on the training hot path.

Times one full-data prediction and one training epoch (Adam, squared loss)
per backend and problem size, reporting the best of ``--repeats`` runs.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 20000x200 100000x1000 --repeats 3
"""

import argparse
import time

import numpy as np

from leakaudit.adversary.kernels import ADAM, SQUARED, get_kernels


def _problem(n, k, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3, 3, size=(n, 1))
    s = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    AT = rng.standard_normal((1, k))
    b = rng.standard_normal(k)
    c = rng.standard_normal(k) * 0.5 / np.sqrt(k)
    return X, s, AT, b, c, np.zeros(1), rng.permutation(n).astype(np.int64)


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(backend, n, k, repeats, batch_size=256):
    table = get_kernels(backend)
    X, s, AT, b, c, c0, order = _problem(n, k)
    state = [np.zeros_like(AT), np.zeros_like(AT), np.zeros(k), np.zeros(k),
             np.zeros(k), np.zeros(k), np.zeros(1), np.zeros(1)]
    # warm-up compiles (or loads cached) numba code
    table["predict"](X[:10], AT, b, c, c0)
    table["train_epoch"](X[:512], s[:512], order[order < 512], AT.copy(), b.copy(), c.copy(),
                         c0.copy(), *[a.copy() for a in state], 0, batch_size, 1e-3, 0.9,
                         0.999, ADAM, SQUARED)

    def predict():
        table["predict"](X, AT, b, c, c0)

    def epoch():
        table["train_epoch"](X, s, order, AT.copy(), b.copy(), c.copy(), c0.copy(),
                             *[a.copy() for a in state], 0, batch_size, 1e-3, 0.9, 0.999,
                             ADAM, SQUARED)

    return _best_of(predict, repeats), _best_of(epoch, repeats)


def _size(text):
    n, k = text.lower().split("x")
    return int(n), int(k)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=_size, nargs="+",
                        default=[(5000, 64), (20000, 200), (100000, 1000)],
                        help="problem sizes as NxK")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    print(f"{'n':>8} {'k':>6} {'backend':>8} {'predict [s]':>12} {'epoch [s]':>10}")
    for n, k in args.sizes:
        timings = {}
        for backend in ("numba", "numpy"):
            timings[backend] = bench(backend, n, k, args.repeats)
            p, e = timings[backend]
            print(f"{n:>8} {k:>6} {backend:>8} {p:>12.4f} {e:>10.4f}")
        speedup = timings["numpy"][1] / timings["numba"][1]
        print(f"{'':>8} {'':>6} {'speedup':>8} {timings['numpy'][0] / timings['numba'][0]:>11.1f}x "
              f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
