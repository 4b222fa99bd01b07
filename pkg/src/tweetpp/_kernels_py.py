"""Pure-Python implementations of the hot loops.

Every function here has a twin in ``_kernels.pyx`` that performs the same
floating-point operations in the same order, so both backends agree bit for
bit on IEEE-754 doubles. Inputs are CSR arrays (``indptr``, ``indices``,
``data``) as produced by :class:`tweetpp.features.Csr`.
"""

import math

import numpy as np

BACKEND = "python"


def row_norms(indptr, indices, data):
    indptr = indptr.tolist()
    data = data.tolist()
    out = []
    for r in range(len(indptr) - 1):
        acc = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            acc += data[p] * data[p]
        out.append(math.sqrt(acc))
    return np.asarray(out, dtype=np.float64)


def cosine_scores(indptr, indices, data, norms, query, query_norm):
    """Cosine similarity of a dense query against every CSR row.

    Zero-norm rows (or a zero-norm query) score 0. Results are clipped to 1.0
    to absorb rounding on identical vectors.
    """
    n = len(indptr) - 1
    out = [0.0] * n
    if query_norm == 0.0:
        return np.asarray(out, dtype=np.float64)
    indptr = indptr.tolist()
    indices = indices.tolist()
    data = data.tolist()
    norms = norms.tolist()
    query = query.tolist()
    for r in range(n):
        if norms[r] == 0.0:
            continue
        dot = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            dot += data[p] * query[indices[p]]
        sim = dot / (norms[r] * query_norm)
        out[r] = 1.0 if sim > 1.0 else sim
    return np.asarray(out, dtype=np.float64)


def sgd_hinge_ovr(indptr, indices, data, targets, n_classes, dim, lam, order):
    """One-vs-rest linear SVMs by Pegasos-style SGD with step 1/(lam*t).

    All classes see every example at every step and share one step counter,
    so the weight matrix is stored as ``scale * v`` with a single scale.
    ``order`` is an (epochs, n) array of example indices. Returns the weight
    matrix and the regularized hinge objective after each epoch.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    data = data.tolist()
    targets = targets.tolist()
    n = len(indptr) - 1
    v = [[0.0] * dim for _ in range(n_classes)]
    scale = 1.0
    t = 0
    objectives = []
    for row in order.tolist():
        for i in row:
            t += 1
            eta = 1.0 / (lam * t)
            lo, hi = indptr[i], indptr[i + 1]
            yi = targets[i]
            viol = []
            for c in range(n_classes):
                vc = v[c]
                dot = 0.0
                for p in range(lo, hi):
                    dot += vc[indices[p]] * data[p]
                y = 1.0 if c == yi else -1.0
                if y * (scale * dot) < 1.0:
                    viol.append((c, y))
            decay = 1.0 - eta * lam
            if decay <= 0.0:
                for c in range(n_classes):
                    v[c] = [0.0] * dim
                scale = 1.0
            else:
                scale *= decay
            for c, y in viol:
                vc = v[c]
                step = eta * y / scale
                for p in range(lo, hi):
                    vc[indices[p]] += step * data[p]
            if scale < 1e-9:
                for c in range(n_classes):
                    v[c] = [x * scale for x in v[c]]
                scale = 1.0
        objectives.append(
            _objective(v, scale, indptr, indices, data, targets, n, n_classes, lam)
        )
    w = np.asarray(v, dtype=np.float64).reshape(n_classes, dim) * scale
    return w, np.asarray(objectives, dtype=np.float64)


def _objective(v, scale, indptr, indices, data, targets, n, n_classes, lam):
    total = 0.0
    for c in range(n_classes):
        vc = v[c]
        sq = 0.0
        for x in vc:
            sq += x * x
        hinge = 0.0
        for i in range(n):
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += vc[indices[p]] * data[p]
            y = 1.0 if c == targets[i] else -1.0
            margin = 1.0 - y * (scale * dot)
            if margin > 0.0:
                hinge += margin
        total += 0.5 * lam * (scale * scale * sq) + hinge / n
    return total / n_classes
