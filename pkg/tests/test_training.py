import numpy as np
import pytest

from classifiers.lstm import LstmConfig
from classifiers.training import (
    balance_classes,
    prepare_examples,
    run_lstm_split,
    split_indices,
    stratified_folds,
    train_linear_cv,
    train_linear_split,
)
from models.entities import LabeledCorpus
from utils.errors import EmptyInputError


NOISE = ["storm", "news", "today", "update", "water", "wind", "city", "people", "road", "power"]


def separable_texts(rng, n, marker):
    return [" ".join(list(rng.choice(NOISE, size=4)) + [marker]) for _ in range(n)]


def test_balance_modes(make_corpus):
    corpus = make_corpus([f"s {i}" for i in range(10)], [f"n {i}" for i in range(4)])

    under = balance_classes(corpus, seed=1)
    assert len(under.solidarity) == len(under.not_solidarity) == 4
    ids = [r.id for r in under.solidarity]
    assert ids == sorted(ids, key=lambda x: int(x[1:]))
    assert balance_classes(corpus, seed=1).solidarity == under.solidarity

    over = balance_classes(corpus, seed=1, mode="oversample")
    assert len(over.solidarity) == len(over.not_solidarity) == 10
    assert over.not_solidarity[:4] == corpus.not_solidarity

    same = balance_classes(corpus, seed=1, mode="none")
    assert len(same.solidarity) == 10 and len(same.not_solidarity) == 4

    with pytest.raises(EmptyInputError):
        balance_classes(LabeledCorpus(solidarity=corpus.solidarity, not_solidarity=[]), seed=1)


def test_prepare_examples_drops_label_hashtags_and_emoji(make_corpus):
    corpus = make_corpus(["Pray for #Paris 🙏"], ["Blame #ISIS 😡"])
    docs, y = prepare_examples(corpus, stop_list={"for"}, strip_hashtags={"paris", "isis"})
    assert docs == [["pray", "🙏"], ["blame", "😡"]]
    assert y.tolist() == [1, 0]

    docs, _ = prepare_examples(corpus, strip_hashtags={"paris", "isis"}, with_emoji=False)
    assert docs == [["pray", "for"], ["blame"]]


def test_folds_partition_and_stratify():
    y = np.array([1] * 30 + [0] * 30)
    folds = stratified_folds(y, 10, seed=4)
    assert len(folds) == 10

    seen = np.concatenate([test for _, test in folds])
    assert sorted(seen.tolist()) == list(range(60))
    for train, test in folds:
        assert set(train).isdisjoint(test)
        assert y[test].sum() == 3

    with pytest.raises(EmptyInputError):
        stratified_folds(np.array([1] * 20 + [0] * 5), 10, seed=1)


def test_split_indices():
    y = np.array([1] * 50 + [0] * 50)
    train, val, test = split_indices(y, seed=3)
    assert (len(train), len(val), len(test)) == (80, 10, 10)
    assert len(set(train) | set(val) | set(test)) == 100
    assert y[test].sum() == 5
    assert np.array_equal(split_indices(y, seed=3)[0], train)


def test_linear_cv_on_separable_corpus(make_corpus):
    rng = np.random.default_rng(0)
    corpus = make_corpus(separable_texts(rng, 100, "hope"), separable_texts(rng, 100, "blame"))

    for mode in ("tfidf", "bigram", "tfidf+bigram"):
        report = train_linear_cv(corpus, mode=mode, folds=10, seed=42)
        assert len(report.fold_accuracies) == 10
        assert report.mean_accuracy == pytest.approx(np.mean(report.fold_accuracies))
        assert report.mean_accuracy >= 0.99


def test_linear_cv_on_random_labels_is_chance(make_corpus):
    rng = np.random.default_rng(1)
    texts = [" ".join(rng.choice(NOISE, size=6)) + f" w{rng.integers(0, 200)}" for _ in range(400)]
    corpus = make_corpus(texts[:200], texts[200:])

    report = train_linear_cv(corpus, mode="tfidf", folds=10, seed=7)
    assert abs(report.mean_accuracy - 0.5) <= 0.08


def test_linear_cv_is_deterministic_across_threads(make_corpus):
    rng = np.random.default_rng(2)
    corpus = make_corpus(separable_texts(rng, 30, "hope"), separable_texts(rng, 30, "blame"))
    first = train_linear_cv(corpus, folds=5, seed=3, threads=1)
    second = train_linear_cv(corpus, folds=5, seed=3, threads=3)
    assert first.fold_accuracies == second.fold_accuracies


def test_linear_split_report(make_corpus):
    rng = np.random.default_rng(3)
    corpus = make_corpus(separable_texts(rng, 50, "hope"), separable_texts(rng, 50, "blame"))
    report = train_linear_split(corpus, mode="tfidf", seed=42)
    assert report.sizes == {"train": 80, "validation": 10, "test": 10}
    assert report.test_accuracy >= 0.9


def test_lstm_split_runs_end_to_end(make_corpus):
    rng = np.random.default_rng(4)
    corpus = make_corpus(separable_texts(rng, 20, "hope"), separable_texts(rng, 20, "blame"))
    config = LstmConfig(hidden=6, embed_dim=5, epochs=3, batch=8, lr=0.1, dropout=0.5, pad_length=8)

    params, vocab, report = run_lstm_split(corpus, config, seed=9)
    assert params.is_finite()
    assert "hope" in vocab and min(vocab.values()) == 2
    assert len(report.loss_curve) == 3
    assert report.sizes["train"] + report.sizes["validation"] + report.sizes["test"] == 40

    _, _, again = run_lstm_split(corpus, config, seed=9)
    assert again.loss_curve == report.loss_curve
