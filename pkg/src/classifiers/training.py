"""
Evaluation protocols for the solidarity classifiers.

Handles class balancing, turning a labeled corpus into token lists and
labels, stratified 10-fold cross-validation and the seeded 80/10/10
train / validation / test split, for both the linear baselines and the
LSTM.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import StratifiedKFold, train_test_split
from tqdm import tqdm

from analysis.corpus import preprocess
from analysis.emojis import is_emoji_token
from classifiers.features import FEATURE_MODES, FeatureMode, LinearModel, fit_vectorizer
from classifiers.lstm import (
    LstmConfig,
    LstmParameters,
    build_vocab,
    evaluate,
    init_parameters,
    pad_batch,
    train_lstm,
)
from models.entities import CvReport, Label, LabeledCorpus, SplitReport
from utils.errors import EmptyInputError
from utils.random_utils import seeded_resample, seeded_sample


BALANCE_MODES = ("undersample", "oversample", "none")

Docs = List[List[str]]


# ---------------------------------------------------------------------
# Data preparation
# ---------------------------------------------------------------------


def balance_classes(corpus: LabeledCorpus, seed: int, mode: str = "undersample") -> LabeledCorpus:
    """
    Equalize the two class sizes.

    ``undersample`` draws the majority class down to the minority size
    (selected records keep their order), ``oversample`` appends seeded
    draws with replacement to the minority class, ``none`` is the identity.

    Args:
        corpus: Labeled corpus.
        seed: Seed for the draw.
        mode: Balancing mode.

    Returns:
        New LabeledCorpus.

    Raises:
        EmptyInputError: If either class is empty.
    """
    if mode not in BALANCE_MODES:
        raise ValueError(f"mode must be one of {BALANCE_MODES}")

    solidarity, other = list(corpus.solidarity), list(corpus.not_solidarity)
    if not solidarity or not other:
        raise EmptyInputError(
            f"Both classes need examples (solidarity={len(solidarity):,}, "
            f"not_solidarity={len(other):,})"
        )

    if mode == "undersample":
        n = min(len(solidarity), len(other))
        if len(solidarity) > n:
            solidarity = seeded_sample(solidarity, n, seed)
        if len(other) > n:
            other = seeded_sample(other, n, seed)
    elif mode == "oversample":
        n = max(len(solidarity), len(other))
        if len(solidarity) < n:
            solidarity = solidarity + seeded_resample(solidarity, n - len(solidarity), seed)
        if len(other) < n:
            other = other + seeded_resample(other, n - len(other), seed)

    print(f"[✅] Balanced classes ({mode}): {len(solidarity):,} / {len(other):,}.")
    return LabeledCorpus(
        solidarity=solidarity,
        not_solidarity=other,
        dropped_conflicts=corpus.dropped_conflicts,
        dropped_unmatched=corpus.dropped_unmatched,
        event_tag=corpus.event_tag,
    )


def prepare_examples(
    corpus: LabeledCorpus,
    stop_list: Iterable[str] = (),
    strip_hashtags: Iterable[str] = (),
    with_emoji: bool = True,
) -> Tuple[Docs, np.ndarray]:
    """
    Token lists and 1/0 labels, Solidarity records first.

    Args:
        corpus: Labeled corpus.
        stop_list: Stopwords to drop.
        strip_hashtags: Annotated hashtags to drop (they decided the label).
        with_emoji: Keep emoji tokens.

    Returns:
        ``(docs, y)``.
    """
    stops = frozenset(stop_list)
    stripped = frozenset(strip_hashtags)

    docs: Docs = []
    labels: List[int] = []
    for label, records in corpus.groups().items():
        for record in records:
            tokens = list(preprocess(record, stops, stripped).tokens)
            if not with_emoji:
                tokens = [t for t in tokens if not is_emoji_token(t)]
            docs.append(tokens)
            labels.append(1 if label is Label.SOLIDARITY else 0)

    return docs, np.asarray(labels, dtype=np.int64)


def _check_class_counts(y: np.ndarray, minimum: int, what: str) -> None:
    counts = np.bincount(y, minlength=2)
    if counts.min() < minimum:
        raise EmptyInputError(
            f"{what} needs at least {minimum} examples per class, got {counts.tolist()}"
        )


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Seeded stratified K-fold ``(train_idx, test_idx)`` pairs.

    Raises:
        EmptyInputError: If a class has fewer examples than folds.
    """
    if folds < 2:
        raise ValueError("folds must be at least 2")
    y = np.asarray(y, dtype=np.int64)
    _check_class_counts(y, folds, f"{folds}-fold cross-validation")

    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(splitter.split(np.zeros(len(y)), y))


def split_indices(
    y: np.ndarray,
    seed: int,
    fractions: Tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stratified seeded train / validation / test index split."""
    if abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) <= 0:
        raise ValueError("fractions must be positive and sum to 1")

    y = np.asarray(y, dtype=np.int64)
    _check_class_counts(y, 5, "A train/validation/test split")

    indices = np.arange(len(y))
    train_idx, hold_idx = train_test_split(
        indices, train_size=fractions[0], stratify=y, random_state=seed
    )
    val_share = fractions[1] / (fractions[1] + fractions[2])
    val_idx, test_idx = train_test_split(
        hold_idx, train_size=val_share, stratify=y[hold_idx], random_state=seed
    )
    return np.sort(train_idx), np.sort(val_idx), np.sort(test_idx)


def _take(docs: Docs, idx: np.ndarray) -> Docs:
    return [docs[i] for i in idx]


def _run_parallel(func, items: Sequence, threads: int, desc: str, quiet: bool) -> List:
    """Map ``func`` over ``items`` keeping input order."""
    if threads <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=quiet)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(tqdm(pool.map(func, items), total=len(items), desc=desc, disable=quiet))


# ---------------------------------------------------------------------
# Linear baselines
# ---------------------------------------------------------------------


def _fit_linear(train_docs: Docs, y_train: np.ndarray, mode: FeatureMode, seed: int):
    vectorizer = fit_vectorizer(train_docs, mode)
    model = LinearModel(seed=seed).fit(vectorizer.transform(train_docs), y_train)
    return vectorizer, model


def train_linear_cv(
    corpus: LabeledCorpus,
    mode: FeatureMode = "tfidf",
    folds: int = 10,
    seed: int = 42,
    stop_list: Iterable[str] = (),
    strip_hashtags: Iterable[str] = (),
    with_emoji: bool = True,
    threads: int = 1,
    quiet: bool = True,
) -> CvReport:
    """
    Stratified K-fold accuracy of the linear SVM.

    Each fold fits its own vectorizer on its training part only.

    Args:
        corpus: Balanced labeled corpus.
        mode: Feature mode.
        folds: Number of folds.
        seed: Seed for folds and training.
        stop_list: Stopwords.
        strip_hashtags: Hashtags removed from the inputs.
        with_emoji: Keep emoji tokens.
        threads: Folds trained concurrently.
        quiet: Disable the progress bar.

    Returns:
        CvReport.
    """
    if mode not in FEATURE_MODES:
        raise ValueError(f"mode must be one of {FEATURE_MODES}")

    docs, y = prepare_examples(corpus, stop_list, strip_hashtags, with_emoji)
    splits = stratified_folds(y, folds, seed)

    def run_fold(fold: int) -> float:
        train_idx, test_idx = splits[fold]
        vectorizer, model = _fit_linear(_take(docs, train_idx), y[train_idx], mode, seed + fold)
        return model.accuracy(vectorizer.transform(_take(docs, test_idx)), y[test_idx])

    accuracies = _run_parallel(run_fold, list(range(folds)), threads, f"SVM {mode} folds", quiet)
    mean = float(np.mean(accuracies))

    print(f"[✅] Linear SVM ({mode}, emoji={with_emoji}): mean {folds}-fold accuracy {mean:.4f}")
    return CvReport(
        fold_accuracies=[float(a) for a in accuracies],
        mean_accuracy=mean,
        config={"model": "svm", "features": mode, "with_emoji": with_emoji, "folds": folds, "seed": seed},
    )


def train_linear_split(
    corpus: LabeledCorpus,
    mode: FeatureMode = "tfidf",
    seed: int = 42,
    stop_list: Iterable[str] = (),
    strip_hashtags: Iterable[str] = (),
    with_emoji: bool = True,
) -> SplitReport:
    """Linear SVM accuracy on a seeded 80/10/10 split."""
    docs, y = prepare_examples(corpus, stop_list, strip_hashtags, with_emoji)
    train_idx, val_idx, test_idx = split_indices(y, seed)

    vectorizer, model = _fit_linear(_take(docs, train_idx), y[train_idx], mode, seed)

    def score(idx: np.ndarray) -> float:
        return model.accuracy(vectorizer.transform(_take(docs, idx)), y[idx])

    report = SplitReport(
        train_accuracy=score(train_idx),
        validation_accuracy=score(val_idx),
        test_accuracy=score(test_idx),
        sizes={"train": len(train_idx), "validation": len(val_idx), "test": len(test_idx)},
        config={"model": "svm", "features": mode, "with_emoji": with_emoji, "seed": seed},
    )
    print(f"[✅] Linear SVM ({mode}, emoji={with_emoji}): test accuracy {report.test_accuracy:.4f}")
    return report


# ---------------------------------------------------------------------
# LSTM
# ---------------------------------------------------------------------


def _fit_lstm(
    train_docs: Docs,
    y_train: np.ndarray,
    config: LstmConfig,
    seed: int,
    embeddings: Optional[Dict[str, np.ndarray]],
    quiet: bool,
) -> Tuple[LstmParameters, Dict[str, int], List[float]]:
    vocab = build_vocab(train_docs)
    params = init_parameters(vocab, config.embed_dim, config.hidden, seed, embeddings)
    X = pad_batch(train_docs, config.pad_length, vocab)
    params, curve = train_lstm(params, X, y_train, config, seed, quiet=quiet)
    return params, vocab, curve


def run_lstm_split(
    corpus: LabeledCorpus,
    config: Optional[LstmConfig] = None,
    seed: int = 42,
    embeddings: Optional[Dict[str, np.ndarray]] = None,
    stop_list: Iterable[str] = (),
    strip_hashtags: Iterable[str] = (),
    with_emoji: bool = True,
    quiet: bool = True,
) -> Tuple[LstmParameters, Dict[str, int], SplitReport]:
    """
    Train the LSTM on 80% of the corpus and score all three parts.

    Args:
        corpus: Balanced labeled corpus.
        config: Hyperparameters.
        seed: Seed for the split, initialization, shuffling and dropout.
        embeddings: Pretrained vectors of dimension ``config.embed_dim``.
        stop_list: Stopwords.
        strip_hashtags: Hashtags removed from the inputs.
        with_emoji: Keep emoji tokens.
        quiet: Disable progress bars.

    Returns:
        Trained parameters, vocabulary and the SplitReport.
    """
    config = config or LstmConfig()
    docs, y = prepare_examples(corpus, stop_list, strip_hashtags, with_emoji)
    train_idx, val_idx, test_idx = split_indices(y, seed)

    params, vocab, curve = _fit_lstm(_take(docs, train_idx), y[train_idx], config, seed, embeddings, quiet)

    def score(idx: np.ndarray) -> float:
        return evaluate(params, pad_batch(_take(docs, idx), config.pad_length, vocab), y[idx])

    report = SplitReport(
        train_accuracy=score(train_idx),
        validation_accuracy=score(val_idx),
        test_accuracy=score(test_idx),
        sizes={"train": len(train_idx), "validation": len(val_idx), "test": len(test_idx)},
        config={"model": "lstm", "with_emoji": with_emoji, "seed": seed, **config.to_dict()},
        loss_curve=curve,
    )
    print(f"[✅] LSTM (emoji={with_emoji}): test accuracy {report.test_accuracy:.4f}")
    return params, vocab, report


def run_lstm_cv(
    corpus: LabeledCorpus,
    config: Optional[LstmConfig] = None,
    folds: int = 10,
    seed: int = 42,
    embeddings: Optional[Dict[str, np.ndarray]] = None,
    stop_list: Iterable[str] = (),
    strip_hashtags: Iterable[str] = (),
    with_emoji: bool = True,
    threads: int = 1,
    quiet: bool = True,
) -> CvReport:
    """Stratified K-fold accuracy of the LSTM (one fresh model per fold)."""
    config = config or LstmConfig()
    docs, y = prepare_examples(corpus, stop_list, strip_hashtags, with_emoji)
    splits = stratified_folds(y, folds, seed)

    def run_fold(fold: int) -> float:
        train_idx, test_idx = splits[fold]
        params, vocab, _ = _fit_lstm(_take(docs, train_idx), y[train_idx], config, seed + fold, embeddings, True)
        return evaluate(params, pad_batch(_take(docs, test_idx), config.pad_length, vocab), y[test_idx])

    accuracies = _run_parallel(run_fold, list(range(folds)), threads, "LSTM folds", quiet)
    mean = float(np.mean(accuracies))

    print(f"[✅] LSTM (emoji={with_emoji}): mean {folds}-fold accuracy {mean:.4f}")
    return CvReport(
        fold_accuracies=[float(a) for a in accuracies],
        mean_accuracy=mean,
        config={"model": "lstm", "with_emoji": with_emoji, "folds": folds, "seed": seed, **config.to_dict()},
    )
