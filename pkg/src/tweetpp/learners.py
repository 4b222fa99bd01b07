"""Single-label classifiers and the label-powerset (LP) meta-classifier."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .corpus import LabelVector
from .features import Csr, FeatureVector


class SingleClassError(ValueError):
    """Raised when a discriminative learner is given only one class."""


def cosine_similarity(a: FeatureVector, b: FeatureVector) -> float:
    if len(a.entries) > len(b.entries):
        a, b = b, a
    dot = 0.0
    for k, v in a.entries.items():
        w = b.entries.get(k)
        if w is not None:
            dot += v * w
    na, nb = a.norm, b.norm
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, dot / (na * nb))


def _dense_query(query: FeatureVector, dimension: int) -> tuple[np.ndarray, float]:
    q = np.zeros(dimension, dtype=np.float64)
    acc = 0.0
    for k, v in query.entries.items():
        if k < dimension:
            q[k] = v
            acc += v * v
    return q, math.sqrt(acc)


class NeighborIndex:
    """Cosine-similarity search over a fixed set of training vectors."""

    def __init__(self, matrix: Csr):
        if matrix.n_rows == 0:
            raise ValueError("neighbor index needs at least one training vector")
        self.matrix = matrix
        self.norms = kernels.row_norms(matrix.indptr, matrix.indices, matrix.data)

    def __len__(self) -> int:
        return self.matrix.n_rows

    def similarities(self, query: FeatureVector) -> np.ndarray:
        q, qn = _dense_query(query, self.matrix.dimension)
        m = self.matrix
        return kernels.cosine_scores(m.indptr, m.indices, m.data, self.norms, q, qn)

    def top(self, query: FeatureVector, k: int) -> list[tuple[int, float]]:
        """The ``k`` most similar rows as (row, similarity); ties go to the lower row."""
        if k < 1:
            raise ValueError("k must be >= 1")
        sims = self.similarities(query)
        order = np.lexsort((np.arange(len(sims)), -sims))[:k]
        return [(int(i), float(sims[i])) for i in order]


@dataclass
class KnnClassifier:
    index: NeighborIndex
    classes: list
    K: int = 10

    def __post_init__(self):
        if len(self.classes) != len(self.index):
            raise ValueError("one class per training vector required")
        if self.K < 1:
            raise ValueError("K must be >= 1")

    def predict(self, query: FeatureVector) -> int:
        neighbors = self.index.top(query, self.K)
        return vote(neighbors, self.classes)

    def to_dict(self) -> dict:
        m = self.index.matrix
        return {
            "type": "knn",
            "K": self.K,
            "classes": list(self.classes),
            "indptr": m.indptr.tolist(),
            "indices": m.indices.tolist(),
            "data": m.data.tolist(),
            "dimension": m.dimension,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KnnClassifier":
        m = Csr(
            np.asarray(d["indptr"], dtype=np.int64),
            np.asarray(d["indices"], dtype=np.int64),
            np.asarray(d["data"], dtype=np.float64),
            d["dimension"],
        )
        return cls(NeighborIndex(m), list(d["classes"]), d["K"])


def vote(neighbors: Sequence[tuple[int, float]], classes: Sequence[int]) -> int:
    """Majority class; ties by larger summed similarity, then lower class id."""
    count: dict[int, int] = defaultdict(int)
    weight: dict[int, float] = defaultdict(float)
    for row, sim in neighbors:
        c = classes[row]
        count[c] += 1
        weight[c] += sim
    return min(count, key=lambda c: (-count[c], -weight[c], c))


def knn_train(matrix: Csr, classes: Sequence[int], K: int = 10) -> KnnClassifier:
    return KnnClassifier(NeighborIndex(matrix), list(classes), K)


def knn_predict(model: KnnClassifier, query: FeatureVector) -> int:
    return model.predict(query)


@dataclass(frozen=True)
class SvmHyper:
    lam: float = 1e-4
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("regularization strength must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class LinearSvm:
    """One-vs-rest linear scorer. ``weights`` has one row per class; last column is the bias."""

    classes: list
    weights: np.ndarray
    hyper: SvmHyper
    objectives: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.weights.shape[1] - 1

    def scores(self, query: FeatureVector) -> np.ndarray:
        idx = np.fromiter((k for k in query.entries if k < self.dimension), dtype=np.int64)
        vals = np.fromiter(
            (v for k, v in query.entries.items() if k < self.dimension), dtype=np.float64
        )
        return self.weights[:, idx] @ vals + self.weights[:, -1]

    def predict(self, query: FeatureVector) -> int:
        # np.argmax keeps the first maximum; classes are sorted ascending.
        return self.classes[int(np.argmax(self.scores(query)))]

    def to_dict(self) -> dict:
        return {
            "type": "svm",
            "classes": list(self.classes),
            "weights": self.weights.tolist(),
            "hyper": asdict(self.hyper),
            "objectives": list(self.objectives),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearSvm":
        return cls(
            list(d["classes"]),
            np.asarray(d["weights"], dtype=np.float64),
            SvmHyper(**d["hyper"]),
            list(d.get("objectives", [])),
        )


def svm_train(matrix: Csr, classes: Sequence[int], hyper: SvmHyper = SvmHyper()) -> LinearSvm:
    """Fit one-vs-rest hinge-loss models with seeded SGD over shuffled epochs."""
    if matrix.n_rows == 0:
        raise ValueError("svm_train got no examples")
    if len(classes) != matrix.n_rows:
        raise ValueError("one class per example required")
    labels = sorted(set(int(c) for c in classes))
    if len(labels) < 2:
        raise SingleClassError(
            f"svm_train needs at least 2 classes, got {labels}; use ConstantClassifier"
        )
    pos = {c: i for i, c in enumerate(labels)}
    targets = np.asarray([pos[int(c)] for c in classes], dtype=np.int64)
    rng = np.random.default_rng(hyper.seed)
    order = np.stack([rng.permutation(matrix.n_rows) for _ in range(hyper.epochs)]).astype(np.int64)
    aug = matrix.with_bias()
    w, objectives = kernels.sgd_hinge_ovr(
        aug.indptr, aug.indices, aug.data, targets, len(labels), aug.dimension, hyper.lam, order
    )
    return LinearSvm(labels, np.asarray(w), hyper, [float(o) for o in objectives])


def svm_predict(model: LinearSvm, query: FeatureVector) -> int:
    return model.predict(query)


@dataclass
class ConstantClassifier:
    value: int

    def predict(self, query: FeatureVector) -> int:
        return self.value

    def to_dict(self) -> dict:
        return {"type": "constant", "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantClassifier":
        return cls(d["value"])


_MODEL_TYPES = {"svm": LinearSvm, "knn": KnnClassifier, "constant": ConstantClassifier}


def model_from_dict(d: dict):
    return _MODEL_TYPES[d["type"]].from_dict(d)


# A base learner maps (training matrix, class ids) to a model with ``predict``.
BaseLearner = Callable[[Csr, Sequence[int]], object]


@dataclass(frozen=True)
class SvmLearner:
    hyper: SvmHyper = SvmHyper()

    def __call__(self, matrix: Csr, classes: Sequence[int]):
        return svm_train(matrix, classes, self.hyper)

    def with_seed(self, seed: int) -> "SvmLearner":
        return SvmLearner(SvmHyper(self.hyper.lam, self.hyper.epochs, seed))


@dataclass(frozen=True)
class NearestNeighborLearner:
    """KNN as a base learner; ``K=1`` memorizes the training set."""

    K: int = 1

    def __call__(self, matrix: Csr, classes: Sequence[int]):
        return knn_train(matrix, classes, self.K)

    def with_seed(self, seed: int) -> "NearestNeighborLearner":
        return self


@dataclass
class LpClassifier:
    """Label powerset over one labelset: each observed projection is one class."""

    labelset: tuple
    codebook: list
    inner: object

    def encode(self, pattern: tuple) -> int:
        return self.codebook.index(tuple(pattern))

    def decode(self, class_id: int) -> tuple:
        return self.codebook[class_id]

    def predict(self, query: FeatureVector) -> dict[int, int]:
        """Per-label 0/1 votes for the labels in this labelset only."""
        pattern = self.decode(self.inner.predict(query))
        return dict(zip(self.labelset, pattern))

    def to_dict(self) -> dict:
        return {
            "labelset": list(self.labelset),
            "codebook": [list(p) for p in self.codebook],
            "inner": self.inner.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LpClassifier":
        return cls(
            tuple(d["labelset"]),
            [tuple(p) for p in d["codebook"]],
            model_from_dict(d["inner"]),
        )


def project(labels: LabelVector, labelset: Sequence[int]) -> tuple:
    return tuple(labels[j] for j in labelset)


def lp_train(
    matrix: Csr,
    labels: Sequence[LabelVector | None],
    labelset: Sequence[int],
    learner: BaseLearner | None = None,
) -> LpClassifier:
    if any(lv is None for lv in labels):
        raise ValueError("lp_train needs every training tweet labeled")
    if len(labels) != matrix.n_rows:
        raise ValueError("one label vector per training row required")
    labelset = tuple(int(j) for j in labelset)
    if len(set(labelset)) != len(labelset):
        raise ValueError(f"labelset {labelset} repeats a label")
    patterns = [project(lv, labelset) for lv in labels]
    codebook = sorted(set(patterns))
    if len(codebook) == 1:
        return LpClassifier(labelset, codebook, ConstantClassifier(0))
    meta = {p: i for i, p in enumerate(codebook)}
    learner = learner or SvmLearner()
    inner = learner(matrix, [meta[p] for p in patterns])
    return LpClassifier(labelset, codebook, inner)


def lp_predict(model: LpClassifier, query: FeatureVector) -> dict[int, int]:
    return model.predict(query)
