from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tweetpp.corpus import Dataset, LabelVector
from tweetpp.evaluation import (
    METHODS,
    combine_baseline,
    hamming_loss,
    run_comparison,
    subset_accuracy,
    sweep_k,
)
from tweetpp.features import PRESETS
from tweetpp.learners import SvmHyper
from tweetpp.rakel import EnsembleConfig
from tweetpp.corpus import split

lv = LabelVector.parse


def test_hamming_examples():
    assert hamming_loss([lv("100|010")], [lv("100|010")]) == 0
    assert hamming_loss([lv("100|010")], [lv("011|101")]) == 1
    assert hamming_loss([lv("100|010")], [lv("000|010")]) == pytest.approx(1 / 6)
    assert hamming_loss([lv("100|010")] * 2, [lv("100|010"), lv("010|010")]) == pytest.approx(1 / 6)


def test_hamming_rejects_bad_input():
    with pytest.raises(ValueError):
        hamming_loss([], [])
    with pytest.raises(ValueError, match="mismatch"):
        hamming_loss([lv("100|010")], [])


def test_subset_accuracy():
    assert subset_accuracy([lv("100|010"), lv("010|010")], [lv("100|010"), lv("100|010")]) == 0.5


def test_combine_baseline():
    out = combine_baseline([2, 0], [0, 1])
    assert [str(v) for v in out] == ["001|100", "100|010"]
    assert all(v.is_valid for v in out)
    with pytest.raises(ValueError):
        combine_baseline([0], [0, 1])
    with pytest.raises(ValueError):
        combine_baseline([3], [0])


valid = st.tuples(st.integers(0, 2), st.integers(0, 2))


@given(st.lists(st.tuples(valid, valid), min_size=1, max_size=30))
def test_baseline_losses_quantized(pairs):
    truth = combine_baseline([a[0] for a, _ in pairs], [a[1] for a, _ in pairs])
    pred = combine_baseline([b[0] for _, b in pairs], [b[1] for _, b in pairs])
    for t, p in zip(truth, pred):
        assert Fraction(hamming_loss([t], [p])).limit_denominator(6) in (0, Fraction(1, 3), Fraction(2, 3))


@pytest.fixture(scope="module")
def halves(synthetic_corpus):
    return split(synthetic_corpus, 200, seed=3)


def test_full_grid(halves):
    train, test = halves
    report = run_comparison(train, test, [PRESETS[p] for p in ("f1", "f2", "f3", "f4", "f5")],
                            svm_hyper=SvmHyper(epochs=5))
    assert len(report.cells) == 25
    for c in report.cells:
        assert c.error is None
        assert 0.0 <= c.hamming_loss <= 1.0
        assert c.repaired_count >= 0
        if c.method in ("knn", "svm", "rakel"):
            assert c.repaired_count == 0
    for m in ("knn", "svm"):
        assert report.cell(m, "f1").invalid_count == 0
    table = report.to_table()
    assert "rakel+wsum" in table and "f5" in table


def test_single_cell_and_extras(halves):
    train, test = halves
    report = run_comparison(train, test, [PRESETS["f5"]], methods=["rakel"], extras=True)
    assert len(report.cells) == 1
    assert "subset_accuracy" in report.cells[0].extras


def test_unknown_method(halves):
    with pytest.raises(ValueError):
        run_comparison(*halves, [PRESETS["f1"]], methods=["lstm"])


def test_sweep_points(halves):
    train, test = halves
    pts = sweep_k(train, test, PRESETS["f3"], "wsum", ensemble_config=EnsembleConfig(seed=1))
    assert [k for k, _ in pts] == list(range(2, 31, 2))
    assert all(0 <= loss <= 1 for _, loss in pts)
    with pytest.raises(ValueError):
        sweep_k(train, test, PRESETS["f3"], "wsum", k_values=[])
    with pytest.raises(ValueError):
        sweep_k(train, test, PRESETS["f3"], "none")


def test_sweep_saturates_beyond_train(halves):
    train, test = halves
    small = Dataset(train.tweets[:20])
    pts = sweep_k(small, test, PRESETS["f1"], "sum", k_values=[20, 50, 100],
                  ensemble_config=EnsembleConfig(seed=2))
    assert pts[0][1] == pts[1][1] == pts[2][1]


def test_methods_constant():
    assert METHODS == ("knn", "svm", "rakel", "rakel+sum", "rakel+wsum")
