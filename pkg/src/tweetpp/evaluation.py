"""Hamming loss, single-label baselines, and the method-by-preset comparison grid."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .corpus import DEFAULT_SPACE, Dataset, LabelSpace, LabelVector
from .features import Csr, FeatureConfig, FeatureVector, Vocabulary, build_vocabulary, featurize_all
from .learners import KnnClassifier, LinearSvm, SvmHyper, knn_train, model_from_dict, svm_train, vote
from .postprocess import NeighborSet, PostprocessConfig, TrainingNeighbors, repair_all
from .rakel import EnsembleConfig, EnsembleModel, train_ensemble
from .seeds import derive_seed

METHODS = ("knn", "svm", "rakel", "rakel+sum", "rakel+wsum")
RAKEL_METHODS = ("rakel", "rakel+sum", "rakel+wsum")


def hamming_loss(truth: Sequence[LabelVector], pred: Sequence[LabelVector]) -> float:
    """Mean over instances of the fraction of label bits that disagree."""
    if len(truth) != len(pred):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(pred)} predictions")
    if not truth:
        raise ValueError("hamming_loss of an empty list is undefined")
    width = len(truth[0])
    total = 0
    for s, y in zip(truth, pred):
        if len(s) != width or len(y) != width:
            raise ValueError("label vectors must share one width")
        total += sum(a != b for a, b in zip(s.bits, y.bits))
    return total / (len(truth) * width)


def subset_accuracy(truth: Sequence[LabelVector], pred: Sequence[LabelVector]) -> float:
    if len(truth) != len(pred) or not truth:
        raise ValueError("need equal, non-empty lists")
    return sum(s.bits == y.bits for s, y in zip(truth, pred)) / len(truth)


def combine_baseline(
    purpose_preds: Sequence[int],
    position_preds: Sequence[int],
    space: LabelSpace = DEFAULT_SPACE,
) -> list[LabelVector]:
    """Join per-group class ids (0-based within each group) into label vectors."""
    if len(purpose_preds) != len(position_preds):
        raise ValueError(
            f"length mismatch: {len(purpose_preds)} purpose vs {len(position_preds)} position"
        )
    n_purpose = len(space.purpose_labels)
    n_position = len(space.position_labels)
    out = []
    for p, q in zip(purpose_preds, position_preds):
        if not 0 <= p < n_purpose:
            raise ValueError(f"purpose class {p} out of range")
        if not 0 <= q < n_position:
            raise ValueError(f"position class {q} out of range")
        out.append(LabelVector.from_indices((p, n_purpose + q), space))
    return out


@dataclass
class Baselines:
    """Two independent classifiers per method, one per label group."""

    knn_purpose: KnnClassifier
    knn_position_classes: list
    svm_purpose: LinearSvm
    svm_position: LinearSvm
    vocab_digest: str

    def predict_knn(self, queries: Sequence[FeatureVector], space: LabelSpace) -> list[LabelVector]:
        p, q = [], []
        K = self.knn_purpose.K
        for x in queries:
            top = self.knn_purpose.index.top(x, K)
            p.append(vote(top, self.knn_purpose.classes))
            q.append(vote(top, self.knn_position_classes))
        return combine_baseline(p, q, space)

    def predict_svm(self, queries: Sequence[FeatureVector], space: LabelSpace) -> list[LabelVector]:
        return combine_baseline(
            [self.svm_purpose.predict(x) for x in queries],
            [self.svm_position.predict(x) for x in queries],
            space,
        )

    def to_dict(self) -> dict:
        return {
            "format": "tweetpp-baselines/1",
            "vocab_digest": self.vocab_digest,
            "knn": self.knn_purpose.to_dict(),
            "knn_position_classes": list(self.knn_position_classes),
            "svm_purpose": self.svm_purpose.to_dict(),
            "svm_position": self.svm_position.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Baselines":
        return cls(
            model_from_dict(d["knn"]),
            list(d["knn_position_classes"]),
            model_from_dict(d["svm_purpose"]),
            model_from_dict(d["svm_position"]),
            d["vocab_digest"],
        )


def train_baselines(
    train: Dataset,
    matrix: Csr,
    vocab_digest: str,
    knn_K: int = 10,
    svm_hyper: SvmHyper = SvmHyper(),
    seed: int = 0,
) -> Baselines:
    train.require_labeled("baseline training")
    purpose = [t.labels.purpose_class() for t in train]
    position = [t.labels.position_class() for t in train]
    hp = SvmHyper(svm_hyper.lam, svm_hyper.epochs, derive_seed(seed, "svm", "purpose"))
    hq = SvmHyper(svm_hyper.lam, svm_hyper.epochs, derive_seed(seed, "svm", "position"))
    return Baselines(
        knn_train(matrix, purpose, knn_K),
        position,
        svm_train(matrix, purpose, hp),
        svm_train(matrix, position, hq),
        vocab_digest,
    )


@dataclass
class PresetData:
    """Train/test tweets featurized under one preset's vocabulary."""

    name: str
    vocab: Vocabulary
    train_matrix: Csr
    test_vectors: list

    @classmethod
    def build(
        cls, train: Dataset, test: Dataset, config: FeatureConfig, joint_counting: bool = False
    ) -> "PresetData":
        count_corpus = list(train) + list(test) if joint_counting else None
        vocab = build_vocabulary(train, config, count_corpus)
        matrix = Csr.from_vectors(featurize_all(train, vocab), vocab.dimension)
        return cls(config.name, vocab, matrix, featurize_all(test, vocab))


@dataclass
class Cell:
    method: str
    preset: str
    hamming_loss: float | None
    repaired_count: int
    K: int | None
    seed: int
    invalid_count: int = 0
    error: str | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not self.extras:
            d.pop("extras")
        if self.error is None:
            d.pop("error")
        return d


@dataclass
class EvalReport:
    cells: list
    dataset: str = ""
    config: dict = field(default_factory=dict)

    def cell(self, method: str, preset: str) -> Cell:
        for c in self.cells:
            if c.method == method and c.preset == preset:
                return c
        raise KeyError((method, preset))

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "config": self.config,
            "cells": [c.to_dict() for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        presets = list(dict.fromkeys(c.preset for c in self.cells))
        methods = list(dict.fromkeys(c.method for c in self.cells))
        lookup = {(c.method, c.preset): c for c in self.cells}

        def fmt(c: Cell | None) -> str:
            if c is None:
                return "-"
            if c.hamming_loss is None:
                return "FAILED"
            return f"{c.hamming_loss:.4f}"

        width = max([len(m) for m in methods] + [6])
        lines = [f"Hamming loss ({self.dataset})" if self.dataset else "Hamming loss"]
        lines.append(" " * width + "".join(f"  {p:>8}" for p in presets))
        for m in methods:
            row = "".join(f"  {fmt(lookup.get((m, p))):>8}" for p in presets)
            lines.append(f"{m:<{width}}{row}")
        repaired = [
            f"  {c.method}/{c.preset}: {c.repaired_count}"
            for c in self.cells
            if c.method in ("rakel+sum", "rakel+wsum")
        ]
        if repaired:
            lines.append("")
            lines.append("repaired predictions:")
            lines.extend(repaired)
        deltas = []
        for base in ("knn", "rakel"):
            for p in presets:
                b = lookup.get((base, p))
                if b is None or not b.hamming_loss:
                    continue
                for m in methods:
                    c = lookup.get((m, p))
                    if m == base or c is None or c.hamming_loss is None:
                        continue
                    diff = b.hamming_loss - c.hamming_loss
                    deltas.append(
                        f"  {m} vs {base} [{p}]: {diff:+.4f} absolute, "
                        f"{100 * diff / b.hamming_loss:+.2f}% relative"
                    )
        if deltas:
            lines.append("")
            lines.append("loss reduction (positive = better than reference):")
            lines.extend(deltas)
        return "\n".join(lines) + "\n"


@dataclass
class PresetOutcome:
    cells: list
    events: dict


def evaluate_preset(
    data: PresetData,
    test: Dataset,
    methods: Sequence[str],
    ensemble: EnsembleModel | None,
    baselines: Baselines | None,
    neighbors: TrainingNeighbors | None,
    K: int = 10,
    scope: str = "violated_groups_only",
    seed: int = 0,
    extras: bool = False,
) -> PresetOutcome:
    """Score already-trained models on one preset's test vectors."""
    truth = test.labels
    space = test.space
    cells, events = [], {}
    rakel_preds = None
    neighbor_sets = None
    for method in methods:
        try:
            repaired = 0
            cell_K = None
            if method == "knn":
                preds = baselines.predict_knn(data.test_vectors, space)
                cell_K = baselines.knn_purpose.K
            elif method == "svm":
                preds = baselines.predict_svm(data.test_vectors, space)
            elif method in RAKEL_METHODS:
                if rakel_preds is None:
                    rakel_preds = ensemble.predict_many(data.test_vectors)
                preds = rakel_preds
                if method != "rakel":
                    if neighbor_sets is None:
                        neighbor_sets = [neighbors.find(x, K) for x in data.test_vectors]
                    cfg = PostprocessConfig(method.split("+")[1], K, scope)
                    preds, evs = repair_all(
                        rakel_preds, neighbor_sets, cfg, [t.id for t in test], neighbors.ids
                    )
                    repaired = len(evs)
                    events[method] = evs
                    cell_K = K
            else:
                raise ValueError(f"unknown method {method!r}")
            cell = Cell(
                method,
                data.name,
                hamming_loss(truth, preds),
                repaired,
                cell_K,
                seed,
                invalid_count=sum(not p.is_valid for p in preds),
            )
            if extras:
                cell.extras = {"subset_accuracy": subset_accuracy(truth, preds)}
        except Exception as exc:
            cell = Cell(method, data.name, None, 0, None, seed, error=f"{type(exc).__name__}: {exc}")
        cells.append(cell)
    return PresetOutcome(cells, events)


def run_comparison(
    train: Dataset,
    test: Dataset,
    presets: Sequence[FeatureConfig],
    methods: Sequence[str] = METHODS,
    ensemble_config: EnsembleConfig = EnsembleConfig(),
    K: int = 10,
    scope: str = "violated_groups_only",
    knn_K: int = 10,
    svm_hyper: SvmHyper = SvmHyper(),
    seed: int = 0,
    joint_counting: bool = False,
    extras: bool = False,
    dataset_name: str = "",
) -> EvalReport:
    """Train, predict, repair and score every (method, preset) pair."""
    train.require_labeled("run_comparison")
    test.require_labeled("run_comparison")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    cells = []
    for config in presets:
        data = PresetData.build(train, test, config, joint_counting)
        ensemble = baselines = neighbors = None
        if any(m in RAKEL_METHODS for m in methods):
            ensemble = train_ensemble(train, data.vocab, ensemble_config, matrix=data.train_matrix)
        if any(m in ("knn", "svm") for m in methods):
            baselines = train_baselines(
                train, data.train_matrix, data.vocab.digest, knn_K, svm_hyper, seed
            )
        if any(m in ("rakel+sum", "rakel+wsum") for m in methods):
            neighbors = TrainingNeighbors(train, data.vocab, data.train_matrix)
        out = evaluate_preset(
            data, test, methods, ensemble, baselines, neighbors, K, scope, seed, extras
        )
        cells.extend(out.cells)
    return EvalReport(
        cells,
        dataset_name,
        {
            "methods": list(methods),
            "presets": [p.name for p in presets],
            "ensemble": asdict(ensemble_config),
            "K": K,
            "scope": scope,
            "knn_K": knn_K,
            "svm": asdict(svm_hyper),
            "seed": seed,
        },
    )


def sweep_from_predictions(
    truth: Sequence[LabelVector],
    preds: Sequence[LabelVector],
    neighbor_sets: Sequence[NeighborSet],
    strategy: str,
    k_values: Sequence[int],
    scope: str = "violated_groups_only",
) -> list[tuple[int, float]]:
    if strategy not in ("sum", "wsum"):
        raise ValueError("sweep strategy must be 'sum' or 'wsum'")
    if not k_values:
        raise ValueError("k_values is empty")
    points = []
    for K in k_values:
        repaired, _ = repair_all(preds, neighbor_sets, PostprocessConfig(strategy, K, scope))
        points.append((K, hamming_loss(truth, repaired)))
    return points


def sweep_k(
    train: Dataset,
    test: Dataset,
    preset: FeatureConfig,
    strategy: str,
    k_values: Sequence[int] = tuple(range(2, 31, 2)),
    ensemble_config: EnsembleConfig = EnsembleConfig(),
    scope: str = "violated_groups_only",
    ensemble: EnsembleModel | None = None,
    data: PresetData | None = None,
) -> list[tuple[int, float]]:
    """Hamming loss per post-processing K, with one ensemble and one neighbor search shared by all K."""
    if strategy not in ("sum", "wsum"):
        raise ValueError("sweep strategy must be 'sum' or 'wsum'")
    if not k_values:
        raise ValueError("k_values is empty")
    if data is None:
        data = PresetData.build(train, test, preset)
    if ensemble is None:
        ensemble = train_ensemble(train, data.vocab, ensemble_config, matrix=data.train_matrix)
    preds = ensemble.predict_many(data.test_vectors)
    neighbors = TrainingNeighbors(train, data.vocab, data.train_matrix)
    kmax = max(k_values)
    sets = [neighbors.find(x, kmax) for x in data.test_vectors]
    return sweep_from_predictions(test.labels, preds, sets, strategy, k_values, scope)
