# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_kernels_py``; same operation order."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "cython"


def row_norms(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
              const double[::1] data):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t r, p
    cdef double acc
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    for r in range(n):
        acc = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            acc += data[p] * data[p]
        o[r] = sqrt(acc)
    return out


def cosine_scores(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                  const double[::1] data, const double[::1] norms,
                  const double[::1] query, double query_norm):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t r, p
    cdef double dot, sim
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    if query_norm == 0.0:
        return out
    for r in range(n):
        if norms[r] == 0.0:
            continue
        dot = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            dot += data[p] * query[indices[p]]
        sim = dot / (norms[r] * query_norm)
        o[r] = 1.0 if sim > 1.0 else sim
    return out


cdef double _objective(double[:, ::1] v, double scale,
                       const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                       const double[::1] data, const cnp.int64_t[::1] targets,
                       Py_ssize_t n, Py_ssize_t n_classes, Py_ssize_t dim, double lam):
    cdef double total = 0.0, sq, hinge, dot, y, margin
    cdef Py_ssize_t c, j, i, p
    for c in range(n_classes):
        sq = 0.0
        for j in range(dim):
            sq += v[c, j] * v[c, j]
        hinge = 0.0
        for i in range(n):
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += v[c, indices[p]] * data[p]
            y = 1.0 if c == targets[i] else -1.0
            margin = 1.0 - y * (scale * dot)
            if margin > 0.0:
                hinge += margin
        total += 0.5 * lam * (scale * scale * sq) + hinge / n
    return total / n_classes


def sgd_hinge_ovr(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                  const double[::1] data, const cnp.int64_t[::1] targets,
                  Py_ssize_t n_classes, Py_ssize_t dim, double lam,
                  const cnp.int64_t[:, ::1] order):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t epochs = order.shape[0]
    cdef Py_ssize_t steps = order.shape[1]
    cdef Py_ssize_t e, s, i, c, j, p, lo, hi, yi
    cdef double scale = 1.0, eta, dot, y, decay, step
    cdef long long t = 0
    w_arr = np.zeros((n_classes, dim), dtype=np.float64)
    cdef double[:, ::1] v = w_arr
    viol_arr = np.zeros(n_classes, dtype=np.float64)
    cdef double[::1] viol = viol_arr
    objectives = np.zeros(epochs, dtype=np.float64)
    cdef double[::1] obj = objectives
    for e in range(epochs):
        for s in range(steps):
            i = order[e, s]
            t += 1
            eta = 1.0 / (lam * t)
            lo = indptr[i]
            hi = indptr[i + 1]
            yi = targets[i]
            for c in range(n_classes):
                dot = 0.0
                for p in range(lo, hi):
                    dot += v[c, indices[p]] * data[p]
                y = 1.0 if c == yi else -1.0
                viol[c] = y if y * (scale * dot) < 1.0 else 0.0
            decay = 1.0 - eta * lam
            if decay <= 0.0:
                for c in range(n_classes):
                    for j in range(dim):
                        v[c, j] = 0.0
                scale = 1.0
            else:
                scale *= decay
            for c in range(n_classes):
                if viol[c] != 0.0:
                    step = eta * viol[c] / scale
                    for p in range(lo, hi):
                        v[c, indices[p]] += step * data[p]
            if scale < 1e-9:
                for c in range(n_classes):
                    for j in range(dim):
                        v[c, j] = v[c, j] * scale
                scale = 1.0
        obj[e] = _objective(v, scale, indptr, indices, data, targets,
                            n, n_classes, dim, lam)
    for c in range(n_classes):
        for j in range(dim):
            v[c, j] = v[c, j] * scale
    return w_arr, objectives
