"""RAkEL: an ensemble of label-powerset models over random k-labelsets.

Each member votes 0/1 on the labels of its own labelset. A label's average
vote is its number of 1-votes over the number of members that voted on it,
and a label is predicted when that average is strictly above ``epsilon``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import DEFAULT_SPACE, Dataset, LabelSpace, LabelVector
from .features import Csr, FeatureVector, Vocabulary, featurize_all
from .learners import BaseLearner, LpClassifier, SvmLearner, lp_train
from .seeds import derive_seed


class CoverageError(ValueError):
    pass


class MemberTrainingError(RuntimeError):
    def __init__(self, labelset, cause: Exception):
        super().__init__(f"training LP member on labelset {list(labelset)} failed: {cause}")
        self.labelset = tuple(labelset)
        self.cause = cause


@dataclass(frozen=True)
class EnsembleConfig:
    k: int = 3
    m: int = 10
    epsilon: float = 0.5
    seed: int = 0
    coverage_check: bool = True

    def validate(self, n_labels: int) -> None:
        if not 1 <= self.k <= n_labels:
            raise ValueError(f"k={self.k} must be in [1, {n_labels}]")
        limit = math.comb(n_labels, self.k)
        if not 1 <= self.m <= limit:
            raise ValueError(f"m={self.m} must be in [1, C({n_labels},{self.k})={limit}]")
        if not 0 <= self.epsilon < 1:
            raise ValueError(f"epsilon={self.epsilon} must be in [0, 1)")


def sample_labelsets(
    n_labels: int,
    k: int,
    m: int,
    seed: int,
    coverage_check: bool = True,
    max_tries: int = 100,
) -> list[tuple[int, ...]]:
    """Draw ``m`` distinct ``k``-subsets of ``range(n_labels)`` without replacement.

    With ``coverage_check`` the draw is repeated (same generator) until every
    label lies in some subset; after ``max_tries`` failures a
    :class:`CoverageError` names the labels left uncovered.
    """
    if not 1 <= k <= n_labels:
        raise ValueError(f"k={k} must be in [1, {n_labels}]")
    pool = list(combinations(range(n_labels), k))
    if not 1 <= m <= len(pool):
        raise ValueError(f"m={m} must be in [1, C({n_labels},{k})={len(pool)}]")
    rng = np.random.default_rng(seed)
    uncovered: set[int] = set()
    for _ in range(max_tries if coverage_check else 1):
        picks = rng.choice(len(pool), size=m, replace=False)
        chosen = [pool[int(i)] for i in picks]
        if not coverage_check:
            return chosen
        uncovered = set(range(n_labels)) - {j for s in chosen for j in s}
        if not uncovered:
            return chosen
    raise CoverageError(
        f"no draw of {m} {k}-labelsets covered labels {sorted(uncovered)} in {max_tries} tries"
    )


@dataclass
class VoteTally:
    sums: list
    votes: list

    @classmethod
    def empty(cls, n_labels: int) -> "VoteTally":
        return cls([0] * n_labels, [0] * n_labels)

    def add(self, member_votes: Mapping[int, int]) -> None:
        for j, v in member_votes.items():
            self.sums[j] += int(v)
            self.votes[j] += 1

    def merge(self, other: "VoteTally") -> "VoteTally":
        return VoteTally(
            [a + b for a, b in zip(self.sums, other.sums)],
            [a + b for a, b in zip(self.votes, other.votes)],
        )

    def averages(self) -> list:
        """Exact average votes; ``None`` for labels no member voted on."""
        return [Fraction(s, v) if v else None for s, v in zip(self.sums, self.votes)]


def tally_votes(member_votes: Iterable[Mapping[int, int]], n_labels: int) -> VoteTally:
    tally = VoteTally.empty(n_labels)
    for mv in member_votes:
        tally.add(mv)
    return tally


def threshold_votes(
    tally: VoteTally, epsilon: float = 0.5, space: LabelSpace = DEFAULT_SPACE
) -> LabelVector:
    eps = Fraction(epsilon)
    bits = [
        int(v > 0 and Fraction(s, v) > eps) for s, v in zip(tally.sums, tally.votes)
    ]
    return LabelVector(tuple(bits), space)


@dataclass
class EnsembleModel:
    config: EnsembleConfig
    members: list
    vocab_digest: str
    space: LabelSpace = DEFAULT_SPACE

    @property
    def labelsets(self) -> list[tuple[int, ...]]:
        return [m.labelset for m in self.members]

    def votes(self, query: FeatureVector) -> VoteTally:
        return tally_votes((m.predict(query) for m in self.members), self.space.size)

    def predict(self, query: FeatureVector) -> LabelVector:
        return threshold_votes(self.votes(query), self.config.epsilon, self.space)

    def predict_many(self, queries: Sequence[FeatureVector]) -> list[LabelVector]:
        return [self.predict(q) for q in queries]

    def to_dict(self) -> dict:
        return {
            "format": "tweetpp-ensemble/1",
            "vocab_digest": self.vocab_digest,
            "config": asdict(self.config),
            "space": {
                "purpose_labels": list(self.space.purpose_labels),
                "position_labels": list(self.space.position_labels),
            },
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleModel":
        space = LabelSpace(
            tuple(d["space"]["purpose_labels"]), tuple(d["space"]["position_labels"])
        )
        return cls(
            EnsembleConfig(**d["config"]),
            [LpClassifier.from_dict(m) for m in d["members"]],
            d["vocab_digest"],
            space,
        )


def predict_votes(model: EnsembleModel, query: FeatureVector) -> VoteTally:
    return model.votes(query)


def train_ensemble(
    train: Dataset,
    vocab: Vocabulary,
    config: EnsembleConfig = EnsembleConfig(),
    learner: BaseLearner | None = None,
    matrix: Csr | None = None,
) -> EnsembleModel:
    """Train one LP member per sampled labelset.

    ``matrix`` may carry the training tweets already featurized under
    ``vocab`` (same order); otherwise they are featurized here. Member ``i``
    gets base-learner seed ``derive_seed(config.seed, "member", i)``.
    """
    train.require_labeled("train_ensemble")
    n_labels = train.space.size
    config.validate(n_labels)
    if matrix is None:
        matrix = Csr.from_vectors(featurize_all(train, vocab), vocab.dimension)
    labelsets = sample_labelsets(
        n_labels, config.k, config.m, derive_seed(config.seed, "labelsets"), config.coverage_check
    )
    learner = learner or SvmLearner()
    reseed = getattr(learner, "with_seed", None)
    labels = train.labels
    members = []
    for i, ls in enumerate(labelsets):
        member_learner = reseed(derive_seed(config.seed, "member", i)) if reseed else learner
        try:
            members.append(lp_train(matrix, labels, ls, member_learner))
        except Exception as exc:
            raise MemberTrainingError(ls, exc) from exc
    return EnsembleModel(config, members, vocab.digest, train.space)


def save_ensemble(model: EnsembleModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_ensemble(path, vocab: Vocabulary | None = None) -> EnsembleModel:
    """Load a saved ensemble; refuses one trained under a different vocabulary."""
    with open(path, encoding="utf-8") as fh:
        model = EnsembleModel.from_dict(json.load(fh))
    if vocab is not None and vocab.digest != model.vocab_digest:
        raise ValueError(
            f"ensemble {path} was trained on vocabulary {model.vocab_digest[:12]}, "
            f"not {vocab.digest[:12]}"
        )
    return model
