"""Labeled tweets, the two-group label space, dataset I/O and seeded splits."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PURPOSE_LABELS = ("express_emotion", "information_sharing", "social_interaction")
POSITION_LABELS = ("pro", "con", "neutral")

# Prose spellings seen in annotation guides, mapped onto the canonical names.
LABEL_ALIASES = {
    "express emotion": "express_emotion",
    "express emotion/personal interests": "express_emotion",
    "express_emotion/personal_interests": "express_emotion",
    "emotion": "express_emotion",
    "information sharing": "information_sharing",
    "info_sharing": "information_sharing",
    "social interaction": "social_interaction",
    "support": "pro",
    "oppose": "con",
}


class DatasetError(ValueError):
    pass


class UnknownLabelError(DatasetError):
    def __init__(self, name: str, lineno: int | None = None):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}unknown label {name!r}")
        self.name = name
        self.lineno = lineno


@dataclass(frozen=True)
class LabelSpace:
    purpose_labels: tuple[str, ...] = PURPOSE_LABELS
    position_labels: tuple[str, ...] = POSITION_LABELS

    def __post_init__(self):
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError("label names must be unique across both groups")
        if not self.purpose_labels or not self.position_labels:
            raise ValueError("both label groups must be non-empty")

    @property
    def names(self) -> tuple[str, ...]:
        return self.purpose_labels + self.position_labels

    @property
    def size(self) -> int:
        return len(self.purpose_labels) + len(self.position_labels)

    @property
    def purpose_indices(self) -> range:
        return range(0, len(self.purpose_labels))

    @property
    def position_indices(self) -> range:
        return range(len(self.purpose_labels), self.size)

    @property
    def groups(self) -> tuple[range, range]:
        return (self.purpose_indices, self.position_indices)

    def index(self, name: str) -> int:
        canon = canonical_label(name)
        try:
            return self.names.index(canon)
        except ValueError:
            raise UnknownLabelError(name) from None

    def name(self, index: int) -> str:
        return self.names[index]


DEFAULT_SPACE = LabelSpace()


def canonical_label(name: str) -> str:
    key = " ".join(str(name).strip().lower().split())
    if key in LABEL_ALIASES:
        return LABEL_ALIASES[key]
    return key.replace(" ", "_").replace("-", "_")


@dataclass(frozen=True)
class LabelVector:
    """Fixed-width 0/1 vector over a label space (purpose block, then position block)."""

    bits: tuple[int, ...]
    space: LabelSpace = field(default=DEFAULT_SPACE, compare=False, repr=False)

    def __post_init__(self):
        bits = tuple(int(bool(b)) for b in self.bits)
        if len(bits) != self.space.size:
            raise ValueError(f"expected {self.space.size} bits, got {len(bits)}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zeros(cls, space: LabelSpace = DEFAULT_SPACE) -> "LabelVector":
        return cls((0,) * space.size, space)

    @classmethod
    def from_indices(cls, indices: Iterable[int], space: LabelSpace = DEFAULT_SPACE) -> "LabelVector":
        bits = [0] * space.size
        for i in indices:
            bits[i] = 1
        return cls(tuple(bits), space)

    @classmethod
    def from_names(cls, purpose: str, position: str, space: LabelSpace = DEFAULT_SPACE) -> "LabelVector":
        p = space.index(purpose)
        q = space.index(position)
        if p not in space.purpose_indices:
            raise DatasetError(f"{purpose!r} is not a purpose label")
        if q not in space.position_indices:
            raise DatasetError(f"{position!r} is not a position label")
        return cls.from_indices((p, q), space)

    @classmethod
    def parse(cls, text: str, space: LabelSpace = DEFAULT_SPACE) -> "LabelVector":
        """Inverse of ``str``: ``"010|100"``."""
        return cls(tuple(int(c) for c in text if c in "01"), space)

    def __str__(self) -> str:
        n = len(self.space.purpose_labels)
        head = "".join(map(str, self.bits[:n]))
        tail = "".join(map(str, self.bits[n:]))
        return f"{head}|{tail}"

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> int:
        return self.bits[i]

    def group_counts(self) -> tuple[int, int]:
        purpose, position = self.space.groups
        return (
            sum(self.bits[i] for i in purpose),
            sum(self.bits[i] for i in position),
        )

    @property
    def is_valid(self) -> bool:
        return self.group_counts() == (1, 1)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.bits) if b)

    def purpose_class(self) -> int:
        """Index within the purpose group; only defined for valid vectors."""
        return self._group_class(0)

    def position_class(self) -> int:
        return self._group_class(1)

    def _group_class(self, g: int) -> int:
        group = self.space.groups[g]
        hits = [i - group.start for i in group if self.bits[i]]
        if len(hits) != 1:
            raise ValueError(f"label vector {self} has no single label in group {g}")
        return hits[0]


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    labels: LabelVector | None = None
    pos_tags: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        if not self.text:
            raise DatasetError(f"tweet {self.id!r} has empty text")
        if self.labels is not None and not self.labels.is_valid:
            raise DatasetError(
                f"tweet {self.id!r}: gold labels {self.labels} need one purpose and one position label"
            )
        if self.pos_tags is not None:
            object.__setattr__(
                self, "pos_tags", tuple((str(t), str(g)) for t, g in self.pos_tags)
            )

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None


@dataclass(frozen=True)
class Dataset:
    tweets: tuple[Tweet, ...]
    space: LabelSpace = DEFAULT_SPACE

    def __post_init__(self):
        object.__setattr__(self, "tweets", tuple(self.tweets))
        seen = set()
        for t in self.tweets:
            if t.id in seen:
                raise DatasetError(f"duplicate tweet id {t.id!r}")
            seen.add(t.id)

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self):
        return iter(self.tweets)

    def __getitem__(self, i: int) -> Tweet:
        return self.tweets[i]

    @property
    def is_labeled(self) -> bool:
        return all(t.is_labeled for t in self.tweets)

    @property
    def labels(self) -> list[LabelVector]:
        return [t.labels for t in self.tweets]

    def require_labeled(self, what: str = "training") -> None:
        missing = [t.id for t in self.tweets if not t.is_labeled]
        if missing:
            raise DatasetError(
                f"{what} needs labeled tweets; {len(missing)} unlabeled (first: {missing[0]!r})"
            )

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.tweets[i] for i in indices), self.space)


def _record_to_tweet(rec: dict, lineno: int, space: LabelSpace) -> Tweet:
    if not isinstance(rec, dict):
        raise DatasetError(f"line {lineno}: record must be an object")
    text = rec.get("text")
    if not isinstance(text, str) or not text:
        raise DatasetError(f"line {lineno}: missing or empty 'text'")
    tid = str(rec.get("id", lineno))
    purpose, position = rec.get("purpose"), rec.get("position")
    labels = None
    if purpose is not None or position is not None:
        if purpose is None or position is None:
            raise DatasetError(f"line {lineno}: record has only one of purpose/position")
        labels = LabelVector.from_names(purpose, position, space)
    tags = rec.get("pos_tags")
    if tags is not None:
        try:
            tags = tuple((str(tok), str(tag)) for tok, tag in tags)
        except (TypeError, ValueError):
            raise DatasetError(f"line {lineno}: pos_tags must be a list of [token, tag] pairs") from None
    return Tweet(tid, text, labels, tags)


def load_dataset(path, space: LabelSpace = DEFAULT_SPACE, min_words: int = 0) -> Dataset:
    """Read one JSON record per line.

    ``min_words`` drops tweets with fewer whitespace-separated words (0 keeps all).
    """
    tweets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {lineno}: malformed record ({exc.msg})") from None
            try:
                tweet = _record_to_tweet(rec, lineno, space)
            except UnknownLabelError as exc:
                raise UnknownLabelError(exc.name, lineno) from None
            if min_words and len(tweet.text.split()) < min_words:
                continue
            tweets.append(tweet)
    return Dataset(tuple(tweets), space)


def tweet_record(tweet: Tweet, space: LabelSpace = DEFAULT_SPACE) -> dict:
    rec: dict = {"id": tweet.id, "text": tweet.text}
    if tweet.labels is not None:
        rec["purpose"] = space.purpose_labels[tweet.labels.purpose_class()]
        rec["position"] = space.position_labels[tweet.labels.position_class()]
    if tweet.pos_tags is not None:
        rec["pos_tags"] = [list(p) for p in tweet.pos_tags]
    return rec


def save_dataset(data: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in data.tweets:
            fh.write(json.dumps(tweet_record(t, data.space), ensure_ascii=False) + "\n")


def split(data: Dataset, train_size: int, seed: int) -> tuple[Dataset, Dataset]:
    if train_size < 0 or train_size > len(data):
        raise ValueError(f"train_size {train_size} outside [0, {len(data)}]")
    perm = np.random.default_rng(seed).permutation(len(data))
    train_idx = sorted(int(i) for i in perm[:train_size])
    test_idx = sorted(int(i) for i in perm[train_size:])
    return data.subset(train_idx), data.subset(test_idx)
