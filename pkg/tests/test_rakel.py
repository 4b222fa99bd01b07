import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from tweetpp import fixtures
from tweetpp.corpus import Dataset
from tweetpp.features import PRESETS, build_vocabulary, featurize
from tweetpp.rakel import (
    CoverageError,
    EnsembleConfig,
    MemberTrainingError,
    VoteTally,
    load_ensemble,
    predict_votes,
    sample_labelsets,
    save_ensemble,
    tally_votes,
    threshold_votes,
    train_ensemble,
)


def test_sample_six_pairs():
    sets = sample_labelsets(6, 2, 6, seed=0)
    assert len(sets) == 6 == len(set(sets))
    assert all(len(s) == 2 for s in sets)
    assert set(sets) <= set(combinations(range(6), 2))


def test_sample_exhaustive_and_bound():
    assert sorted(sample_labelsets(6, 2, 15, seed=1)) == list(combinations(range(6), 2))
    with pytest.raises(ValueError):
        sample_labelsets(6, 2, 16, seed=1)


def test_sample_deterministic():
    assert sample_labelsets(6, 3, 10, seed=4) == sample_labelsets(6, 3, 10, seed=4)


def test_coverage_unreachable_names_labels():
    with pytest.raises(CoverageError, match=r"\[\d"):
        sample_labelsets(6, 2, 2, seed=0)
    assert len(sample_labelsets(6, 2, 2, seed=0, coverage_check=False)) == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, math.comb(6, k)))),
       st.integers(0, 2**31))
def test_sample_properties(km, seed):
    k, m = km
    sets = sample_labelsets(6, k, m, seed, coverage_check=False)
    assert len(set(sets)) == m
    assert all(len(s) == k and len(set(s)) == k for s in sets)


def test_table5_averages_and_threshold():
    averages, final = fixtures.table5()
    assert averages[:5] == [Fraction(2, 3), 0, Fraction(1, 3), Fraction(1, 2), 1]
    assert averages[5] is None
    assert final.indices == (0, 4)


def test_threshold_strict():
    tally = VoteTally([1, 0, 0, 0, 0, 0], [2, 0, 0, 0, 0, 0])
    assert threshold_votes(tally, 0.5).bits[0] == 0
    tally = VoteTally([2, 0, 0, 0, 0, 0], [3, 0, 0, 0, 0, 0])
    assert threshold_votes(tally, 0.5).bits[0] == 1


def test_threshold_zero_and_uncovered():
    assert threshold_votes(VoteTally([0] * 6, [3] * 6)).bits == (0,) * 6
    assert threshold_votes(VoteTally([0] * 6, [0] * 6), 0.0).bits == (0,) * 6


def test_unanimity():
    tally = tally_votes([{0: 1, 3: 1}, {0: 1, 4: 0}, {0: 1}], 6)
    assert tally.averages()[0] == 1
    assert tally.votes[5] == 0


@given(st.lists(st.dictionaries(st.integers(0, 5), st.integers(0, 1), min_size=1, max_size=3), max_size=15))
def test_vote_bounds_and_merge(members):
    tally = tally_votes(members, 6)
    for s, v in zip(tally.sums, tally.votes):
        assert 0 <= s <= v <= len(members)
    half = len(members) // 2
    merged = tally_votes(members[:half], 6).merge(tally_votes(members[half:], 6))
    assert merged == tally


def test_config_bounds():
    EnsembleConfig(k=2, m=15).validate(6)
    for bad in (EnsembleConfig(k=0), EnsembleConfig(k=7), EnsembleConfig(k=2, m=16),
                EnsembleConfig(epsilon=1.0), EnsembleConfig(epsilon=-0.1)):
        with pytest.raises(ValueError):
            bad.validate(6)


@pytest.fixture(scope="module")
def trained(synthetic_corpus):
    vocab = build_vocabulary(synthetic_corpus, PRESETS["f3"])
    return vocab, train_ensemble(synthetic_corpus, vocab, EnsembleConfig(k=2, m=6, seed=7))


def test_train_table5_shape(trained):
    vocab, model = trained
    assert len(model.members) == 6
    assert len(set(model.labelsets)) == 6
    assert all(len(ls) == 2 for ls in model.labelsets)


def test_degenerate_shapes(synthetic_corpus):
    vocab = build_vocabulary(synthetic_corpus, PRESETS["f1"])
    full = train_ensemble(synthetic_corpus, vocab, EnsembleConfig(k=6, m=1))
    assert full.labelsets == [tuple(range(6))]
    single = train_ensemble(synthetic_corpus, vocab, EnsembleConfig(k=1, m=1, coverage_check=False))
    assert len(single.members) == 1 and len(single.labelsets[0]) == 1
    assert len(single.members[0].codebook) == 2


def test_unlabeled_training_rejected(synthetic_corpus):
    from tweetpp.corpus import Tweet

    data = Dataset(synthetic_corpus.tweets[:10] + (Tweet("u", "no label"),))
    vocab = build_vocabulary(data, PRESETS["f1"])
    with pytest.raises(ValueError, match="labeled"):
        train_ensemble(data, vocab, EnsembleConfig(k=2, m=6))


def test_member_failure_carries_labelset(synthetic_corpus):
    vocab = build_vocabulary(synthetic_corpus, PRESETS["f1"])

    def broken(matrix, classes):
        raise RuntimeError("boom")

    with pytest.raises(MemberTrainingError) as info:
        train_ensemble(synthetic_corpus, vocab, EnsembleConfig(k=2, m=6), learner=broken)
    assert len(info.value.labelset) == 2


def test_predict_votes_counts(trained, synthetic_corpus):
    vocab, model = trained
    x = featurize(synthetic_corpus[0], vocab)
    tally = predict_votes(model, x)
    expected = [sum(j in ls for ls in model.labelsets) for j in range(6)]
    assert tally.votes == expected


def test_save_load_round_trip(tmp_path, trained, synthetic_corpus):
    vocab, model = trained
    path = tmp_path / "ens.json"
    save_ensemble(model, path)
    again = load_ensemble(path, vocab)
    xs = [featurize(t, vocab) for t in synthetic_corpus.tweets[:30]]
    assert again.predict_many(xs) == model.predict_many(xs)
    save_ensemble(again, tmp_path / "ens2.json")
    assert path.read_bytes() == (tmp_path / "ens2.json").read_bytes()


def test_load_refuses_other_vocabulary(tmp_path, trained, synthetic_corpus):
    _, model = trained
    path = tmp_path / "ens.json"
    save_ensemble(model, path)
    other = build_vocabulary(synthetic_corpus, PRESETS["f1"])
    with pytest.raises(ValueError, match="vocabulary"):
        load_ensemble(path, other)


def test_training_deterministic(synthetic_corpus, trained):
    vocab, model = trained
    again = train_ensemble(synthetic_corpus, vocab, EnsembleConfig(k=2, m=6, seed=7))
    assert again.to_dict() == model.to_dict()
