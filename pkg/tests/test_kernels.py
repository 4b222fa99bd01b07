"""Both kernel backends against each other and against dense numpy oracles."""

import numpy as np
import pytest

from tweetpp import _kernels_py, kernels
from tweetpp.features import Csr, FeatureVector

BACKENDS = kernels.available_backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def random_csr(rng, n, dim, density=0.2, counts=False):
    vecs = []
    for _ in range(n):
        mask = rng.random(dim) < density
        vals = rng.integers(1, 4, size=dim) if counts else np.ones(dim)
        vecs.append(FeatureVector({int(i): float(vals[i]) for i in np.flatnonzero(mask)}, dim))
    return Csr.from_vectors(vecs, dim)


def dense(m: Csr) -> np.ndarray:
    out = np.zeros((m.n_rows, m.dimension))
    for r in range(m.n_rows):
        lo, hi = m.indptr[r], m.indptr[r + 1]
        out[r, m.indices[lo:hi]] = m.data[lo:hi]
    return out


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cosine_matches_dense_oracle(name):
    k = BACKENDS[name]
    rng = np.random.default_rng(0)
    m = random_csr(rng, 50, 30, counts=True)
    X = dense(m)
    norms = k.row_norms(m.indptr, m.indices, m.data)
    np.testing.assert_allclose(norms, np.linalg.norm(X, axis=1), rtol=1e-12)
    q = X[7].copy()
    sims = k.cosine_scores(m.indptr, m.indices, m.data, norms, q, float(np.linalg.norm(q)))
    expected = np.array(
        [x @ q / (np.linalg.norm(x) * np.linalg.norm(q)) if np.linalg.norm(x) else 0.0 for x in X]
    )
    np.testing.assert_allclose(sims, np.minimum(expected, 1.0), rtol=1e-12, atol=1e-15)
    assert sims[7] == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_zero_query_scores_zero(name):
    k = BACKENDS[name]
    m = random_csr(np.random.default_rng(1), 5, 8)
    norms = k.row_norms(m.indptr, m.indices, m.data)
    out = k.cosine_scores(m.indptr, m.indices, m.data, norms, np.zeros(8), 0.0)
    assert not out.any()


def dense_pegasos(X, targets, n_classes, lam, order):
    """Straightforward dense Pegasos one-vs-rest, no scale trick."""
    W = np.zeros((n_classes, X.shape[1]))
    t = 0
    for row in order:
        for i in row:
            t += 1
            eta = 1.0 / (lam * t)
            y = np.where(np.arange(n_classes) == targets[i], 1.0, -1.0)
            viol = y * (W @ X[i]) < 1.0
            W *= 1.0 - eta * lam
            W[viol] += eta * y[viol, None] * X[i]
    return W


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_sgd_matches_dense_pegasos(name):
    k = BACKENDS[name]
    rng = np.random.default_rng(2)
    m = random_csr(rng, 40, 12, density=0.3, counts=True)
    targets = rng.integers(0, 3, size=40).astype(np.int64)
    order = np.stack([rng.permutation(40) for _ in range(5)]).astype(np.int64)
    w, obj = k.sgd_hinge_ovr(m.indptr, m.indices, m.data, targets, 3, 12, 0.01, order)
    expected = dense_pegasos(dense(m), targets, 3, 0.01, order)
    np.testing.assert_allclose(w, expected, rtol=1e-9, atol=1e-9)
    assert obj.shape == (5,)


@needs_ext
def test_backends_agree_bitwise():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    rng = np.random.default_rng(3)
    m = random_csr(rng, 80, 40, counts=True)
    n1 = py.row_norms(m.indptr, m.indices, m.data)
    n2 = cy.row_norms(m.indptr, m.indices, m.data)
    assert np.array_equal(n1, n2)
    q = dense(m)[3]
    qn = float(np.sqrt(np.sum(q * q)))
    assert np.array_equal(
        py.cosine_scores(m.indptr, m.indices, m.data, n1, q, qn),
        cy.cosine_scores(m.indptr, m.indices, m.data, n2, q, qn),
    )
    targets = rng.integers(0, 4, size=80).astype(np.int64)
    order = np.stack([rng.permutation(80) for _ in range(8)]).astype(np.int64)
    w1, o1 = py.sgd_hinge_ovr(m.indptr, m.indices, m.data, targets, 4, 40, 1e-4, order)
    w2, o2 = cy.sgd_hinge_ovr(m.indptr, m.indices, m.data, targets, 4, 40, 1e-4, order)
    assert np.array_equal(w1, w2)
    assert np.array_equal(o1, o2)


def test_selected_backend_reported():
    assert kernels.BACKEND in BACKENDS
    assert _kernels_py.BACKEND == "python"


def test_env_forces_pure_python():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TWEETPP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from tweetpp import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
