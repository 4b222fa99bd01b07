"""Repair predictions that break the one-purpose, one-position rule.

A prediction with zero or several labels in a group is re-derived from the
gold labels of its K most similar training tweets, either by counting them
(``sum``) or by adding up their similarities (``wsum``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .corpus import Dataset, LabelVector
from .features import Csr, FeatureVector, Vocabulary, featurize_all
from .learners import NeighborIndex

STRATEGIES = ("none", "sum", "wsum")
SCOPES = ("violated_groups_only", "full_relabel")


@dataclass(frozen=True)
class PostprocessConfig:
    strategy: str = "wsum"
    K: int = 10
    scope: str = "violated_groups_only"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if self.K < 1:
            raise ValueError("K must be >= 1")


class Neighbor(NamedTuple):
    index: int
    similarity: float
    labels: LabelVector


@dataclass(frozen=True)
class NeighborSet:
    neighbors: tuple

    def __post_init__(self):
        object.__setattr__(self, "neighbors", tuple(Neighbor(*n) for n in self.neighbors))
        sims = [n.similarity for n in self.neighbors]
        if any(a < b for a, b in zip(sims, sims[1:])):
            raise ValueError("neighbors must be ordered by non-increasing similarity")

    def __len__(self) -> int:
        return len(self.neighbors)

    def __iter__(self):
        return iter(self.neighbors)

    def head(self, K: int) -> "NeighborSet":
        return NeighborSet(self.neighbors[:K])

    @property
    def ids(self) -> list[int]:
        return [n.index for n in self.neighbors]


class TrainingNeighbors:
    """Featurized, labeled training tweets ready for similarity search."""

    def __init__(self, train: Dataset, vocab: Vocabulary, matrix: Csr | None = None):
        if len(train) == 0:
            raise ValueError("neighbor search needs a non-empty training set")
        train.require_labeled("post-processing")
        if matrix is None:
            matrix = Csr.from_vectors(featurize_all(train, vocab), vocab.dimension)
        self.labels = train.labels
        self.ids = [t.id for t in train]
        self.index = NeighborIndex(matrix)

    def find(self, query: FeatureVector, K: int) -> NeighborSet:
        top = self.index.top(query, K)
        return NeighborSet(tuple(Neighbor(i, s, self.labels[i]) for i, s in top))


def find_neighbors(
    query: FeatureVector, train: Dataset, vocab: Vocabulary, K: int
) -> NeighborSet:
    """Top-K training tweets by cosine similarity; ties go to the lower training index."""
    return TrainingNeighbors(train, vocab).find(query, K)


def needs_repair(pred: LabelVector) -> tuple[bool, bool]:
    purpose, position = pred.group_counts()
    return purpose != 1, position != 1


def _scores(neighbors: NeighborSet, weighted: bool) -> list[float]:
    width = len(neighbors.neighbors[0].labels)
    use_weights = weighted and any(n.similarity > 0 for n in neighbors)
    scores = [0.0] * width
    for n in neighbors:
        w = n.similarity if use_weights else 1.0
        for j in n.labels.indices:
            scores[j] += w
    return scores


def _repair(
    neighbors: NeighborSet,
    pred: LabelVector,
    flags: Sequence[bool] | None,
    scope: str,
    weighted: bool,
) -> LabelVector:
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    if flags is None:
        flags = needs_repair(pred)
    if not any(flags):
        return pred
    if len(neighbors) == 0:
        raise ValueError("cannot repair from an empty neighbor set")
    if scope == "full_relabel":
        flags = (True, True)
    scores = _scores(neighbors, weighted)
    bits = list(pred.bits)
    for fix, group in zip(flags, pred.space.groups):
        if not fix:
            continue
        # max() keeps the first maximal element, i.e. the lower label index on ties
        best = max(group, key=lambda j: scores[j])
        for j in group:
            bits[j] = int(j == best)
    return LabelVector(tuple(bits), pred.space)


def repair_sum(
    neighbors: NeighborSet,
    pred: LabelVector,
    flags: Sequence[bool] | None = None,
    scope: str = "violated_groups_only",
) -> LabelVector:
    return _repair(neighbors, pred, flags, scope, weighted=False)


def repair_wsum(
    neighbors: NeighborSet,
    pred: LabelVector,
    flags: Sequence[bool] | None = None,
    scope: str = "violated_groups_only",
) -> LabelVector:
    return _repair(neighbors, pred, flags, scope, weighted=True)


def group_scores(neighbors: NeighborSet, strategy: str) -> list[float]:
    return _scores(neighbors, weighted=strategy == "wsum")


@dataclass
class RepairEvent:
    tweet_id: str
    before: str
    after: str
    groups: list
    neighbor_ids: list
    scores: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "before": self.before,
            "after": self.after,
            "groups": self.groups,
            "neighbor_ids": self.neighbor_ids,
            "scores": self.scores,
        }


def repair(
    pred: LabelVector, neighbors: NeighborSet, config: PostprocessConfig
) -> LabelVector:
    if config.strategy == "none":
        return pred
    nb = neighbors.head(config.K)
    fn = repair_wsum if config.strategy == "wsum" else repair_sum
    return fn(nb, pred, scope=config.scope)


def repair_all(
    preds: Sequence[LabelVector],
    neighbor_sets: Sequence[NeighborSet],
    config: PostprocessConfig,
    tweet_ids: Sequence[str] | None = None,
    train_ids: Sequence[str] | None = None,
) -> tuple[list[LabelVector], list[RepairEvent]]:
    """Repair every violating prediction; returns the new predictions and one event per repair.

    ``neighbor_sets`` may hold more than ``config.K`` neighbors each; only the
    first ``K`` are used, so one search at the largest K serves a sweep.
    """
    if len(preds) != len(neighbor_sets):
        raise ValueError("one neighbor set per prediction required")
    out: list[LabelVector] = []
    events: list[RepairEvent] = []
    for i, (pred, nbs) in enumerate(zip(preds, neighbor_sets)):
        flags = needs_repair(pred)
        if config.strategy == "none" or not any(flags):
            out.append(pred)
            continue
        fixed = repair(pred, nbs, config)
        out.append(fixed)
        nb = nbs.head(config.K)
        groups = ["purpose", "position"] if config.scope == "full_relabel" else [
            g for g, f in zip(("purpose", "position"), flags) if f
        ]
        ids = [train_ids[n.index] if train_ids else n.index for n in nb]
        events.append(
            RepairEvent(
                tweet_id=str(tweet_ids[i]) if tweet_ids else str(i),
                before=str(pred),
                after=str(fixed),
                groups=groups,
                neighbor_ids=ids,
                scores=[round(s, 12) for s in group_scores(nb, config.strategy)],
            )
        )
    return out, events
