"""
Bag-of-words features and the linear SVM baseline.

Three feature modes are supported: word bigram counts, unigram TF-IDF, and
both blocks side by side. IDF uses the smoothed form
``ln((1 + N) / (1 + df)) + 1`` with raw term counts and no normalization.
The classifier is a hinge-loss linear model with L2 regularization trained
by seeded stochastic subgradient descent.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import CountVectorizer, TfidfTransformer
from sklearn.linear_model import SGDClassifier
from typing_extensions import Literal, get_args

from utils.errors import EmptyInputError


FeatureMode = Literal["bigram", "tfidf", "tfidf+bigram"]
FEATURE_MODES: Tuple[str, ...] = get_args(FeatureMode)

Doc = Sequence[str]


def _unigrams(doc: Doc) -> List[str]:
    return list(doc)


def _bigrams(doc: Doc) -> List[Tuple[str, str]]:
    return list(zip(doc, doc[1:]))


def _counter() -> CountVectorizer:
    return CountVectorizer(analyzer=_unigrams, lowercase=False, token_pattern=None)


class FeatureVectorizer:
    """
    Fitted vocabulary plus IDF weights for one feature mode.

    Unigram terms are token strings, bigram terms ``(left, right)`` tuples.
    In the combined mode TF-IDF columns come first.
    """

    def __init__(self, mode: FeatureMode = "tfidf") -> None:
        if mode not in FEATURE_MODES:
            raise ValueError(f"mode must be one of {FEATURE_MODES}")
        self.mode = mode
        self.vocabulary: Dict[Hashable, int] = {}
        self.idf: Dict[int, float] = {}
        self.doc_freq: Dict[int, int] = {}
        self.n_docs = 0
        self._unigram = None
        self._tfidf = None
        self._bigram = None

    @property
    def uses_tfidf(self) -> bool:
        return self.mode in ("tfidf", "tfidf+bigram")

    @property
    def uses_bigrams(self) -> bool:
        return self.mode in ("bigram", "tfidf+bigram")

    def fit(self, docs: Sequence[Doc]) -> "FeatureVectorizer":
        """
        Learn the vocabulary (and IDF) from token lists.

        Raises:
            EmptyInputError: If there are no documents or no terms.
        """
        docs = [list(doc) for doc in docs]
        if not docs:
            raise EmptyInputError("Cannot fit features on zero documents")

        self.n_docs = len(docs)
        blocks = []
        offset = 0
        vocabulary: Dict[Hashable, int] = {}

        if self.uses_tfidf:
            self._unigram = _counter()
            try:
                counts = self._unigram.fit_transform(docs)
            except ValueError:
                counts = None
            if counts is not None:
                self._tfidf = TfidfTransformer(norm=None, use_idf=True, smooth_idf=True).fit(counts)
                for term, col in self._unigram.vocabulary_.items():
                    vocabulary[term] = col
                for col, value in enumerate(self._tfidf.idf_):
                    self.idf[col] = float(value)
                blocks.append(counts)
                offset = counts.shape[1]
            else:
                self._unigram = None

        if self.uses_bigrams:
            self._bigram = CountVectorizer(analyzer=_bigrams, lowercase=False, token_pattern=None)
            try:
                counts = self._bigram.fit_transform(docs)
            except ValueError:
                counts = None
            if counts is not None:
                for term, col in self._bigram.vocabulary_.items():
                    vocabulary[term] = offset + col
                blocks.append(counts)
            else:
                self._bigram = None

        if not vocabulary:
            raise EmptyInputError("Empty vocabulary: the documents contain no terms")

        self.vocabulary = vocabulary
        df = np.asarray((sp.hstack(blocks).tocsr() > 0).sum(axis=0)).ravel()
        self.doc_freq = {col: int(v) for col, v in enumerate(df)}
        return self

    def counts(self, docs: Sequence[Doc]) -> sp.csr_matrix:
        """Raw term counts in vocabulary column order."""
        docs = [list(doc) for doc in docs]
        blocks = []
        if self._unigram is not None:
            blocks.append(self._unigram.transform(docs))
        if self._bigram is not None:
            blocks.append(self._bigram.transform(docs))
        return sp.hstack(blocks, format="csr", dtype=np.float64)

    def transform(self, docs: Sequence[Doc]) -> sp.csr_matrix:
        """Feature matrix; unseen terms contribute nothing."""
        docs = [list(doc) for doc in docs]
        blocks = []
        if self._unigram is not None:
            blocks.append(self._tfidf.transform(self._unigram.transform(docs)))
        if self._bigram is not None:
            blocks.append(self._bigram.transform(docs))
        return sp.hstack(blocks, format="csr", dtype=np.float64)


def fit_vectorizer(docs: Sequence[Doc], mode: FeatureMode = "tfidf") -> FeatureVectorizer:
    """Fit a :class:`FeatureVectorizer` on token lists."""
    return FeatureVectorizer(mode).fit(docs)


class LinearModel:
    """
    Linear SVM: hinge loss, L2 penalty, seeded subgradient descent.

    Labels are 1 (Solidarity) and 0 (NotSolidarity); the prediction is the
    sign of ``w·x + b``.
    """

    def __init__(self, alpha: float = 1e-4, epochs: int = 50, seed: int = 42) -> None:
        self.alpha = alpha
        self.epochs = epochs
        self.seed = seed
        self.weights = np.zeros(0)
        self.bias = 0.0
        self._model = SGDClassifier(
            loss="hinge",
            penalty="l2",
            alpha=alpha,
            max_iter=epochs,
            tol=None,
            shuffle=True,
            random_state=seed,
        )

    def fit(self, X: sp.spmatrix, y: np.ndarray) -> "LinearModel":
        y = np.asarray(y, dtype=np.int64)
        if len(np.unique(y)) < 2:
            raise EmptyInputError("Training data must contain both classes")
        self._model.fit(X, y)
        self.weights = self._model.coef_.ravel().copy()
        self.bias = float(self._model.intercept_[0])
        return self

    def decision_function(self, X: sp.spmatrix) -> np.ndarray:
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict(self, X: sp.spmatrix) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)

    def accuracy(self, X: sp.spmatrix, y: np.ndarray) -> float:
        y = np.asarray(y)
        return float(np.mean(self.predict(X) == y)) if len(y) else 0.0
