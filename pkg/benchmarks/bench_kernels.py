"""Time the compiled and pure-Python kernels on a realistic workload.

Run with ``python3 benchmarks/bench_kernels.py``. The workload is the f5
feature matrix of a 1,000-tweet synthetic corpus split 600/400: one
cosine scan of every test tweet against the training rows, and one
one-vs-rest SGD fit over the three purpose classes.
"""

import argparse
import time

import numpy as np

from tweetpp.corpus import split
from tweetpp.features import PRESETS, Csr, build_vocabulary, featurize
from tweetpp.kernels import available_backends
from tweetpp.synthetic import generate_corpus


def workload(n: int, train_size: int, seed: int):
    data = generate_corpus(n, seed=seed)
    train, test = split(data, train_size, seed=seed)
    vocab = build_vocabulary(train, PRESETS["f5"])
    matrix = Csr.from_vectors([featurize(t, vocab) for t in train], vocab.dimension)
    queries = [featurize(t, vocab).dense() for t in test]
    targets = np.array([t.labels.purpose_class() for t in train], dtype=np.int64)
    bias = matrix.with_bias()
    rng = np.random.default_rng(seed)
    order = np.stack([rng.permutation(bias.n_rows) for _ in range(50)]).astype(np.int64)
    return matrix, queries, bias, targets, order


def run_cosine(k, matrix, queries):
    norms = k.row_norms(matrix.indptr, matrix.indices, matrix.data)
    return [
        k.cosine_scores(matrix.indptr, matrix.indices, matrix.data, norms, q, float(np.sqrt(q @ q)))
        for q in queries
    ]


def run_sgd(k, bias, targets, order):
    return k.sgd_hinge_ovr(bias.indptr, bias.indices, bias.data, targets, 3, bias.dimension, 1e-4, order)


def best_of(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--train-size", type=int, default=600)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    matrix, queries, bias, targets, order = workload(args.n, args.train_size, args.seed)
    print(f"train rows {matrix.n_rows}, queries {len(queries)}, dimension {matrix.dimension}, nnz {len(matrix.data)}")
    backends = available_backends()
    timings, outputs = {}, {}
    for name, k in sorted(backends.items()):
        t_cos, sims = best_of(lambda: run_cosine(k, matrix, queries), args.repeats)
        t_sgd, fit = best_of(lambda: run_sgd(k, bias, targets, order), args.repeats)
        timings[name] = (t_cos, t_sgd)
        outputs[name] = (sims, fit)
        print(f"{name:>7}: cosine scan {t_cos * 1e3:9.2f} ms   sgd fit {t_sgd * 1e3:9.2f} ms")
    if "cython" not in backends:
        print("compiled extension not built; only the fallback was timed")
        return
    (s_py, f_py), (s_cy, f_cy) = outputs["python"], outputs["cython"]
    same = all(np.array_equal(a, b) for a, b in zip(s_py, s_cy))
    same = same and np.array_equal(f_py[0], f_cy[0]) and np.array_equal(f_py[1], f_cy[1])
    print(f"outputs bitwise identical: {same}")
    py, cy = timings["python"], timings["cython"]
    print(f"speedup: cosine {py[0] / cy[0]:.1f}x, sgd {py[1] / cy[1]:.1f}x")


if __name__ == "__main__":
    main()
