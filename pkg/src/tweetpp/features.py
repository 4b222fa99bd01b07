"""Tweet tokenization and sparse feature extraction.

Four families are supported: n-gram presence (unigrams, bigrams), part-of-speech
tag counts, punctuation counts and Twitter-specific counts. A
:class:`Vocabulary` is built once from training tweets, with rare n-grams
pruned, and is never extended afterwards.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .corpus import Dataset, Tweet

UNIGRAM = "unigram"
BIGRAM = "bigram"
PUNCTUATION = "punctuation"
POS_TAG = "pos_tag"
TWITTER = "twitter"

FAMILY_ORDER = (UNIGRAM, BIGRAM, POS_TAG, PUNCTUATION, TWITTER)

PUNCTUATION_MARKS = ("!", "?", ":")
TWITTER_SIGNALS = ("hashtag_count", "mention_count", "retweet_present", "hyperlink_count")

_URL = r"(?:https?://|www\.)(?:\S*[^\s.,!?:;'\")\]])?"
_EMAIL = r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+"
_TOKEN_RE = re.compile(
    "|".join(
        [
            _URL,
            _EMAIL,
            r"@\w+",
            r"#\w+",
            r"\w+(?:['’]\w+)*",
            r"[^\w\s]",
        ]
    ),
    re.UNICODE,
)
_URL_RE = re.compile(r"(?:https?://|www\.)", re.IGNORECASE)
_EMAIL_RE = re.compile(rf"^{_EMAIL}$")
_NUMBER_RE = re.compile(r"^\d+(?:[.,]\d+)*$")


def tokenize(text: str, lower: bool = True) -> list[str]:
    """Split tweet text into word, URL, e-mail, mention, hashtag and punctuation tokens."""
    tokens = _TOKEN_RE.findall(text)
    if lower:
        tokens = [t.lower() for t in tokens]
    return tokens


def is_url(token: str) -> bool:
    return _URL_RE.match(token) is not None


def is_email(token: str) -> bool:
    return token.count("@") == 1 and _EMAIL_RE.match(token) is not None


def fallback_pos_tag(tokens: Sequence[str]) -> list[tuple[str, str]]:
    """Coarse rule-based tags, used only when a tweet carries no tagger output.

    This is an approximation of a real Twitter POS tagger: it distinguishes
    surface token types, not syntactic categories.
    """
    tagged = []
    for tok in tokens:
        if tok == "RT":
            tag = "retweet"
        elif is_url(tok):
            tag = "url"
        elif is_email(tok):
            tag = "email"
        elif tok.startswith("@") and len(tok) > 1:
            tag = "mention"
        elif tok.startswith("#") and len(tok) > 1:
            tag = "hashtag"
        elif _NUMBER_RE.match(tok):
            tag = "number"
        elif len(tok) == 1 and not tok.isalnum() and not tok.isspace():
            tag = "punct"
        else:
            tag = "word"
        tagged.append((tok, tag))
    return tagged


class FeatureDescriptor(NamedTuple):
    kind: str
    key: str


@dataclass(frozen=True)
class FeatureConfig:
    unigram: bool = True
    bigram: bool = True
    pos: bool = True
    stat: bool = True
    min_unigram_count: int = 2
    min_bigram_count: int = 4
    name: str = "custom"

    def __post_init__(self):
        if not (self.unigram or self.bigram or self.pos or self.stat):
            raise ValueError("feature config enables no family")
        if self.min_unigram_count < 1 or self.min_bigram_count < 1:
            raise ValueError("pruning thresholds must be >= 1")

    @property
    def families(self) -> tuple[str, ...]:
        on = {
            UNIGRAM: self.unigram,
            BIGRAM: self.bigram,
            POS_TAG: self.pos,
            PUNCTUATION: self.stat,
            TWITTER: self.stat,
        }
        return tuple(f for f in FAMILY_ORDER if on[f])


PRESETS = {
    "f1": FeatureConfig(unigram=True, bigram=False, pos=False, stat=False, name="f1"),
    "f2": FeatureConfig(unigram=False, bigram=True, pos=False, stat=False, name="f2"),
    "f3": FeatureConfig(unigram=True, bigram=True, pos=False, stat=False, name="f3"),
    "f4": FeatureConfig(unigram=True, bigram=True, pos=True, stat=False, name="f4"),
    "f5": FeatureConfig(unigram=True, bigram=True, pos=True, stat=True, name="f5"),
}


def preset(name: str) -> FeatureConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown feature preset {name!r}; choose from {sorted(PRESETS)}") from None


class TweetAnalysis(NamedTuple):
    unigrams: list[str]
    bigrams: list[str]
    pos_tags: list[str]
    punctuation: Counter
    twitter: dict


def analyze(tweet: Tweet) -> TweetAnalysis:
    raw = tokenize(tweet.text, lower=False)
    lowered = [t.lower() for t in raw]
    bigrams = [f"{a} {b}" for a, b in zip(lowered, lowered[1:])]
    if tweet.pos_tags is not None:
        tags = [tag for _, tag in tweet.pos_tags]
    else:
        tags = [tag for _, tag in fallback_pos_tag(raw)]
    punct = Counter(t for t in raw if t in PUNCTUATION_MARKS)
    twitter = {
        "hashtag_count": sum(1 for t in raw if t.startswith("#") and len(t) > 1),
        "mention_count": sum(1 for t in raw if t.startswith("@") and len(t) > 1),
        "retweet_present": int("RT" in raw),
        "hyperlink_count": sum(1 for t in raw if is_url(t) or is_email(t)),
    }
    return TweetAnalysis(lowered, bigrams, tags, punct, twitter)


@dataclass(frozen=True)
class FeatureVector:
    entries: dict
    dimension: int

    def __post_init__(self):
        clean = {int(k): float(v) for k, v in self.entries.items() if v != 0}
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __getitem__(self, index: int) -> float:
        return self.entries.get(index, 0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=np.float64)
        for k, v in self.entries.items():
            out[k] = v
        return out

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(v * v for v in self.entries.values())))


@dataclass
class Vocabulary:
    descriptors: list
    config: FeatureConfig
    counts: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.descriptors = [FeatureDescriptor(*d) for d in self.descriptors]
        self.index_of = {d: i for i, d in enumerate(self.descriptors)}
        if len(self.index_of) != len(self.descriptors):
            raise ValueError("duplicate feature descriptors")

    def __len__(self) -> int:
        return len(self.descriptors)

    @property
    def dimension(self) -> int:
        return len(self.descriptors)

    def get(self, kind: str, key: str) -> int | None:
        return self.index_of.get(FeatureDescriptor(kind, key))

    @property
    def digest(self) -> str:
        payload = json.dumps(
            {"config": asdict(self.config), "descriptors": [list(d) for d in self.descriptors]},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "descriptors": [list(d) for d in self.descriptors],
            "counts": [self.counts.get(d, 0) for d in self.descriptors],
            "stats": self.stats,
            "digest": self.digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        descriptors = [FeatureDescriptor(*x) for x in d["descriptors"]]
        vocab = cls(
            descriptors,
            FeatureConfig(**d["config"]),
            dict(zip(descriptors, d.get("counts", []))),
            d.get("stats", {}),
        )
        if "digest" in d and d["digest"] != vocab.digest:
            raise ValueError("vocabulary digest does not match its contents")
        return vocab

    def featurize(self, tweet: Tweet) -> FeatureVector:
        return featurize(tweet, self)


def build_vocabulary(
    train: Dataset | Sequence[Tweet],
    config: FeatureConfig,
    count_corpus: Iterable[Tweet] | None = None,
) -> Vocabulary:
    """Freeze the feature index for ``config`` from the training tweets.

    n-gram counts are total occurrences over ``count_corpus`` (the training
    tweets when omitted). Unigrams seen fewer than ``min_unigram_count``
    times and bigrams seen fewer than ``min_bigram_count`` times are dropped.
    """
    tweets = list(train)
    if not tweets:
        raise ValueError("cannot build a vocabulary from an empty training set")
    counting = list(count_corpus) if count_corpus is not None else tweets
    analyses = [analyze(t) for t in counting]
    uni = Counter(u for a in analyses for u in a.unigrams)
    bi = Counter(b for a in analyses for b in a.bigrams)
    train_analyses = analyses if count_corpus is None else [analyze(t) for t in tweets]
    tags = Counter(g for a in train_analyses for g in a.pos_tags)

    descriptors: list[FeatureDescriptor] = []
    counts: dict = {}
    stats: dict = {"joint_counting": count_corpus is not None}
    families = config.families
    if UNIGRAM in families:
        kept = sorted(u for u, c in uni.items() if c >= config.min_unigram_count)
        stats["unigram_types"] = len(uni)
        stats["unigram_kept"] = len(kept)
        for u in kept:
            d = FeatureDescriptor(UNIGRAM, u)
            descriptors.append(d)
            counts[d] = uni[u]
    if BIGRAM in families:
        kept = sorted(b for b, c in bi.items() if c >= config.min_bigram_count)
        stats["bigram_types"] = len(bi)
        stats["bigram_kept"] = len(kept)
        for b in kept:
            d = FeatureDescriptor(BIGRAM, b)
            descriptors.append(d)
            counts[d] = bi[b]
    if POS_TAG in families:
        for g in sorted(tags):
            d = FeatureDescriptor(POS_TAG, g)
            descriptors.append(d)
            counts[d] = tags[g]
    if PUNCTUATION in families:
        for mark in PUNCTUATION_MARKS:
            d = FeatureDescriptor(PUNCTUATION, mark)
            descriptors.append(d)
            counts[d] = sum(a.punctuation[mark] for a in train_analyses)
    if TWITTER in families:
        for sig in TWITTER_SIGNALS:
            d = FeatureDescriptor(TWITTER, sig)
            descriptors.append(d)
            counts[d] = sum(a.twitter[sig] for a in train_analyses)
    return Vocabulary(descriptors, config, counts, stats)


def featurize(tweet: Tweet, vocab: Vocabulary) -> FeatureVector:
    a = analyze(tweet)
    index = vocab.index_of
    entries: dict[int, float] = {}
    families = vocab.config.families
    if UNIGRAM in families:
        for u in a.unigrams:
            i = index.get((UNIGRAM, u))
            if i is not None:
                entries[i] = 1.0
    if BIGRAM in families:
        for b in a.bigrams:
            i = index.get((BIGRAM, b))
            if i is not None:
                entries[i] = 1.0
    if POS_TAG in families:
        for g, c in Counter(a.pos_tags).items():
            i = index.get((POS_TAG, g))
            if i is not None:
                entries[i] = float(c)
    if PUNCTUATION in families:
        for mark in PUNCTUATION_MARKS:
            entries[index[(PUNCTUATION, mark)]] = float(a.punctuation[mark])
    if TWITTER in families:
        for sig in TWITTER_SIGNALS:
            entries[index[(TWITTER, sig)]] = float(a.twitter[sig])
    return FeatureVector(entries, vocab.dimension)


def featurize_all(tweets: Iterable[Tweet], vocab: Vocabulary) -> list[FeatureVector]:
    return [featurize(t, vocab) for t in tweets]


@dataclass(frozen=True)
class Csr:
    """Row-stacked sparse vectors in compressed sparse row layout."""

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    dimension: int

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], dimension: int | None = None) -> "Csr":
        if dimension is None:
            dimension = vectors[0].dimension if vectors else 0
        indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
        idx: list[int] = []
        val: list[float] = []
        for r, v in enumerate(vectors):
            idx.extend(v.entries.keys())
            val.extend(v.entries.values())
            indptr[r + 1] = len(idx)
        return cls(
            indptr,
            np.asarray(idx, dtype=np.int64),
            np.asarray(val, dtype=np.float64),
            int(dimension),
        )

    @property
    def n_rows(self) -> int:
        return len(self.indptr) - 1

    def row(self, r: int) -> FeatureVector:
        lo, hi = self.indptr[r], self.indptr[r + 1]
        return FeatureVector(
            dict(zip(self.indices[lo:hi].tolist(), self.data[lo:hi].tolist())), self.dimension
        )

    def with_bias(self) -> "Csr":
        """Append a constant 1.0 column at index ``dimension``."""
        n = self.n_rows
        counts = np.diff(self.indptr)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(counts + 1)
        indices = np.empty(len(self.indices) + n, dtype=np.int64)
        data = np.empty(len(self.data) + n, dtype=np.float64)
        for r in range(n):
            lo, hi = self.indptr[r], self.indptr[r + 1]
            out = indptr[r]
            k = hi - lo
            indices[out : out + k] = self.indices[lo:hi]
            data[out : out + k] = self.data[lo:hi]
            indices[out + k] = self.dimension
            data[out + k] = 1.0
        return Csr(indptr, indices, data, self.dimension + 1)
