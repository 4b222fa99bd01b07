"""Synthetic labeled tweets with planted keyword and cluster signals.

Real annotated corpora for this task are not public, so experiments and tests
run on generated tweets. Labels come from "stories": each story fixes a
(purpose, position) pair drawn from a joint table with strong correlation
between the two groups, and a combination of cluster words. Every cluster
word is shared by several stories with different labels, so only the
combination identifies the story. Linear models cannot read a combination;
cosine neighbors can. Each tweet also carries class keywords, each swapped for
another class's keyword with probability ``noise``, plus topic words, filler
and purpose-dependent Twitter signals (links and hashtags for sharing,
mentions and questions for interaction, exclamation marks for emotion).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .corpus import DEFAULT_SPACE, Dataset, LabelSpace, LabelVector, Tweet

# rows: purpose, columns: position (pro, con, neutral)
JOINT_COUNTS = np.array(
    [
        [106, 190, 56],
        [236, 149, 92],
        [44, 84, 43],
    ],
    dtype=np.float64,
)

PURPOSE_WORDS = (
    ("love", "hate", "feel", "sad", "angry", "happy", "ugh", "wow", "awful", "amazing", "scared", "tired"),
    ("report", "news", "study", "announced", "according", "article", "update", "data", "released", "official", "breaking", "poll"),
    ("thanks", "hey", "agree", "reply", "dear", "friend", "question", "tell", "ask", "dm", "follow", "welcome"),
)
POSITION_WORDS = (
    ("support", "good", "great", "benefit", "helps", "fair", "needed", "right", "yes", "protect", "works", "saves"),
    ("against", "bad", "wrong", "disaster", "failure", "stop", "repeal", "harm", "broken", "terrible", "scam", "ruin"),
    ("maybe", "unsure", "mixed", "wonder", "both", "depends", "perhaps", "debate", "undecided", "curious", "whether", "sides"),
)
TOPIC_WORDS = ("obamacare", "healthcare", "insurance", "aca", "plan", "policy", "coverage", "law", "premiums", "exchange")
FILLER_WORDS = (
    "the", "a", "is", "this", "that", "and", "of", "to", "in", "it", "for", "on", "with", "my",
    "we", "they", "today", "people", "about", "just", "so", "all", "now", "what", "when", "more",
    "some", "new", "one", "still", "really", "how", "every", "after", "week", "time", "year",
    "going", "again", "here", "there", "our", "their", "much", "many", "says", "think", "know",
)


CLUSTER_WORDS = (
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
    "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey", "xray",
)


def generate_corpus(
    n: int = 1000,
    seed: int = 0,
    noise: float = 0.45,
    n_stories: int = 80,
    story_size: int = 3,
    keywords_per_group: int = 3,
    space: LabelSpace = DEFAULT_SPACE,
    joint: np.ndarray = JOINT_COUNTS,
) -> Dataset:
    if joint.shape != (len(space.purpose_labels), len(space.position_labels)):
        raise ValueError("joint table must be purpose x position")
    rng = np.random.default_rng(seed)
    probs = (joint / joint.sum()).ravel()
    n_pos = joint.shape[1]
    combos = list(combinations(range(len(CLUSTER_WORDS)), story_size))
    if n_stories > len(combos):
        raise ValueError(f"at most {len(combos)} distinct stories of size {story_size}")
    stories = []
    for c in rng.choice(len(combos), size=n_stories, replace=False):
        p, q = divmod(int(rng.choice(len(probs), p=probs)), n_pos)
        stories.append((p, q, [CLUSTER_WORDS[j] for j in combos[int(c)]]))
    tweets = []
    for i in range(n):
        p, q, words = stories[int(rng.integers(n_stories))]
        words = list(words)
        for bank, label in ((PURPOSE_WORDS, p), (POSITION_WORDS, q)):
            for _ in range(keywords_per_group):
                src = label if rng.random() >= noise else int(rng.integers(len(bank)))
                words.append(bank[src][int(rng.integers(len(bank[src])))])
        words.append(TOPIC_WORDS[int(rng.integers(len(TOPIC_WORDS)))])
        words.extend(
            FILLER_WORDS[int(j)]
            for j in rng.integers(len(FILLER_WORDS), size=int(rng.integers(3, 7)))
        )
        rng.shuffle(words)
        if p == 0 and rng.random() < 0.6:
            words.append("!")
        if p == 1:
            if rng.random() < 0.7:
                words.append(f"http://t.co/{int(rng.integers(10**6)):06d}")
            if rng.random() < 0.4:
                words.append("#" + TOPIC_WORDS[int(rng.integers(len(TOPIC_WORDS)))])
        if p == 2:
            words.insert(0, f"@user{int(rng.integers(500))}")
            if rng.random() < 0.5:
                words.append("?")
        if rng.random() < 0.08:
            words.insert(0, "RT")
        labels = LabelVector.from_indices((p, len(space.purpose_labels) + q), space)
        tweets.append(Tweet(f"syn{i:05d}", " ".join(words), labels))
    return Dataset(tuple(tweets), space)
