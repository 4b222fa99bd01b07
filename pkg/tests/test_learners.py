import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tweetpp.corpus import LabelVector
from tweetpp.features import Csr, FeatureVector
from tweetpp.learners import (
    ConstantClassifier,
    KnnClassifier,
    LinearSvm,
    LpClassifier,
    NearestNeighborLearner,
    NeighborIndex,
    SingleClassError,
    SvmHyper,
    cosine_similarity,
    knn_predict,
    knn_train,
    lp_predict,
    lp_train,
    model_from_dict,
    svm_predict,
    svm_train,
    vote,
)


def fv(d, dim=10):
    return FeatureVector(d, dim)


def test_cosine_examples():
    a = fv({1: 1, 2: 1})
    assert cosine_similarity(a, a) == pytest.approx(1.0)
    assert cosine_similarity(a, fv({5: 2})) == 0.0
    # dot = 1, |a| = |b| = sqrt 2
    assert cosine_similarity(a, fv({1: 1, 3: 1})) == pytest.approx(0.5, abs=1e-15)
    assert cosine_similarity(a, fv({})) == 0.0


sparse_vecs = st.dictionaries(st.integers(0, 9), st.integers(0, 5), max_size=6).map(
    lambda d: FeatureVector(d, 10)
)


@given(sparse_vecs, sparse_vecs)
def test_cosine_properties(a, b):
    s = cosine_similarity(a, b)
    assert s == cosine_similarity(b, a)
    assert 0.0 <= s <= 1.0
    if a.norm > 0:
        assert cosine_similarity(a, a) == pytest.approx(1.0)


def test_index_cosine_agrees_with_pairwise():
    rng = np.random.default_rng(0)
    vecs = [fv({int(i): float(rng.integers(1, 4)) for i in rng.choice(10, 4, replace=False)}) for _ in range(20)]
    index = NeighborIndex(Csr.from_vectors(vecs, 10))
    q = vecs[3]
    sims = index.similarities(q)
    for v, s in zip(vecs, sims):
        assert s == pytest.approx(cosine_similarity(q, v), abs=1e-12)


def test_top_k_brute_force_with_ties():
    vecs = [fv({0: 1}), fv({0: 1, 1: 1}), fv({0: 1}), fv({2: 1}), fv({0: 1})]
    index = NeighborIndex(Csr.from_vectors(vecs, 10))
    top = index.top(fv({0: 1}), 3)
    assert [i for i, _ in top] == [0, 2, 4]
    assert len(index.top(fv({0: 1}), 99)) == 5


def test_vote_tie_breaks():
    # K=2, classes a=0 and b=1, sims 0.9 and 0.4: counts tie, larger summed similarity wins.
    assert vote([(0, 0.9), (1, 0.4)], [0, 1]) == 0
    assert vote([(0, 0.4), (1, 0.9)], [0, 1]) == 1
    # counts and sums tie: lower class id
    assert vote([(0, 0.5), (1, 0.5)], [3, 2]) == 2
    assert vote([(0, 0.1), (1, 0.1), (2, 0.9)], [0, 0, 1]) == 0


def test_knn_identity_and_majority():
    vecs = [fv({0: 1}), fv({1: 1}), fv({2: 1}), fv({0: 1, 3: 1}), fv({0: 1, 4: 1})]
    model = knn_train(Csr.from_vectors(vecs, 10), [0, 1, 2, 1, 1], K=1)
    for v, c in zip(vecs, [0, 1, 2, 1, 1]):
        assert knn_predict(model, v) == c
    model3 = KnnClassifier(model.index, [0, 1, 2, 1, 1], K=3)
    assert knn_predict(model3, fv({0: 1})) == 1


def test_knn_zero_query_falls_to_tie_break():
    vecs = [fv({0: 1}), fv({1: 1}), fv({2: 1})]
    model = knn_train(Csr.from_vectors(vecs, 10), [2, 1, 0], K=3)
    assert knn_predict(model, fv({})) == 0


def separable(n=40, seed=0):
    rng = np.random.default_rng(seed)
    vecs, classes = [], []
    for _ in range(n):
        sign = rng.choice([-1.0, 1.0])
        x = {0: sign * rng.uniform(0.5, 2.0), 1: rng.uniform(-1, 1), 2: 1.0}
        vecs.append(fv(x, 4))
        classes.append(int(sign > 0))
    return Csr.from_vectors(vecs, 4), classes, vecs


def test_svm_fits_separable_set():
    m, classes, vecs = separable()
    model = svm_train(m, classes, SvmHyper(lam=1e-3, epochs=50, seed=1))
    assert [svm_predict(model, v) for v in vecs] == classes
    assert model.objectives[-1] < model.objectives[0]


def test_svm_deterministic():
    m, classes, _ = separable()
    a = svm_train(m, classes, SvmHyper(seed=5))
    b = svm_train(m, classes, SvmHyper(seed=5))
    assert np.array_equal(a.weights, b.weights)
    c = svm_train(m, classes, SvmHyper(seed=6))
    assert not np.array_equal(a.weights, c.weights)


def test_svm_rejects_bad_input():
    with pytest.raises(ValueError):
        svm_train(Csr.from_vectors([], 4), [])
    m, _, _ = separable(5)
    with pytest.raises(SingleClassError):
        svm_train(m, [1] * 5)


def test_svm_degenerate_queries():
    w = np.array([[1.0, 0.0, 0.2], [0.0, 1.0, 0.7], [0.0, 0.0, 0.7]])
    model = LinearSvm([0, 1, 2], w, SvmHyper())
    assert svm_predict(model, fv({}, 2)) == 1
    assert svm_predict(model, fv({0: 0.5}, 2)) == 0
    tied = LinearSvm([0, 1], np.array([[1.0, 0.0], [1.0, 0.0]]), SvmHyper())
    assert svm_predict(tied, fv({0: 1.0}, 1)) == 0


def test_svm_round_trip():
    m, classes, vecs = separable()
    model = svm_train(m, classes)
    again = model_from_dict(model.to_dict())
    assert np.array_equal(again.weights, model.weights)
    assert [again.predict(v) for v in vecs] == [model.predict(v) for v in vecs]


def labels(*texts):
    return [LabelVector.parse(t) for t in texts]


def test_lp_powerset_classes():
    gold = labels("100|100", "100|010", "010|100", "001|001")
    m = Csr.from_vectors([fv({i: 1}) for i in range(4)], 10)
    model = lp_train(m, gold, (0, 3), NearestNeighborLearner(1))
    assert sorted(model.codebook) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for p in model.codebook:
        assert model.decode(model.encode(p)) == p


def test_lp_valid_purpose_pairs_never_both():
    valid = [LabelVector.from_indices((p, q)) for p in range(3) for q in range(3, 6)]
    patterns = {(v[0], v[1]) for v in valid}
    assert patterns == {(0, 0), (1, 0), (0, 1)}
    m = Csr.from_vectors([fv({i: 1}, 9) for i in range(9)], 9)
    model = lp_train(m, valid, (0, 1), NearestNeighborLearner(1))
    assert set(model.codebook) <= patterns


def test_lp_single_pattern_constant():
    gold = labels("100|100", "100|010")
    m = Csr.from_vectors([fv({0: 1}), fv({1: 1})], 10)
    model = lp_train(m, gold, (0,))
    assert isinstance(model.inner, ConstantClassifier)
    assert lp_predict(model, fv({5: 1})) == {0: 1}


def test_lp_predict_votes_only_on_labelset():
    model = LpClassifier((0, 3), [(0, 0), (1, 0)], ConstantClassifier(1))
    assert lp_predict(model, fv({})) == {0: 1, 3: 0}
    empty = LpClassifier((0, 3), [(0, 0), (1, 0)], ConstantClassifier(0))
    assert lp_predict(empty, fv({})) == {0: 0, 3: 0}


def test_lp_rejects_unlabeled():
    m = Csr.from_vectors([fv({0: 1})], 10)
    with pytest.raises(ValueError):
        lp_train(m, [None], (0, 1))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(3, 5)), min_size=2, max_size=12),
       st.sampled_from(list(itertools.combinations(range(6), 2))))
def test_lp_codebook_round_trip(pairs, labelset):
    gold = [LabelVector.from_indices(p) for p in pairs]
    m = Csr.from_vectors([fv({i: 1}, 12) for i in range(len(gold))], 12)
    model = lp_train(m, gold, labelset, NearestNeighborLearner(1))
    observed = {tuple(g[j] for j in labelset) for g in gold}
    assert set(model.codebook) == observed
    for p in model.codebook:
        assert model.decode(model.encode(p)) == p
    again = LpClassifier.from_dict(model.to_dict())
    assert again.codebook == model.codebook
