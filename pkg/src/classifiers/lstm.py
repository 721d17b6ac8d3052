"""
Single-layer LSTM binary classifier in numpy.

Sequences are padded index vectors (0 = padding, 1 = unknown token).
Padding steps keep the previous state, the final hidden state feeds a
logistic output unit, and training is plain minibatch gradient descent on
the mean binary cross-entropy with dropout on the final state.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from models import BaseModel
from utils.errors import NumericError
from utils.io_utils import ensure_parent
from utils.random_utils import make_rng


PAD_INDEX = 0
UNK_INDEX = 1

GATES = ("i", "f", "o", "g")
PARAM_NAMES = (
    ("E",)
    + tuple(f"W_{g}" for g in GATES)
    + tuple(f"U_{g}" for g in GATES)
    + tuple(f"b_{g}" for g in GATES)
    + ("w_out", "b_out")
)


# ---------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class LstmConfig(BaseModel):
    """Hyperparameters of the recurrent classifier."""

    hidden: int = 64
    embed_dim: int = 50
    epochs: int = 20
    batch: int = 25
    lr: float = 0.001
    dropout: float = 0.5
    pad_length: int = 100

    def __post_init__(self) -> None:
        if min(self.hidden, self.embed_dim, self.epochs, self.batch, self.pad_length) < 1:
            raise ValueError("LSTM sizes, epochs, batch and pad length must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class LstmParameters:
    """Embedding table, four gates and the output unit."""

    E: np.ndarray
    W_i: np.ndarray
    W_f: np.ndarray
    W_o: np.ndarray
    W_g: np.ndarray
    U_i: np.ndarray
    U_f: np.ndarray
    U_o: np.ndarray
    U_g: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_g: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray = field(default_factory=lambda: np.zeros(1))

    @property
    def embed_dim(self) -> int:
        return self.E.shape[1]

    @property
    def hidden(self) -> int:
        return self.U_i.shape[0]

    def arrays(self) -> Dict[str, np.ndarray]:
        """Parameter arrays in a fixed order."""
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "LstmParameters":
        return LstmParameters(**{name: arr.copy() for name, arr in self.arrays().items()})

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(arr)) for arr in self.arrays().values())

    @classmethod
    def zeros(cls, vocab_size: int, embed_dim: int, hidden: int) -> "LstmParameters":
        shapes = _shapes(vocab_size, embed_dim, hidden)
        return cls(**{name: np.zeros(shape) for name, shape in shapes.items()})


def _shapes(vocab_size: int, d: int, h: int) -> Dict[str, Tuple[int, ...]]:
    shapes: Dict[str, Tuple[int, ...]] = {"E": (vocab_size, d)}
    for g in GATES:
        shapes[f"W_{g}"] = (d, h)
    for g in GATES:
        shapes[f"U_{g}"] = (h, h)
    for g in GATES:
        shapes[f"b_{g}"] = (h,)
    shapes["w_out"] = (h,)
    shapes["b_out"] = (1,)
    return shapes


# ---------------------------------------------------------------------
# Vocabulary, embeddings, padding
# ---------------------------------------------------------------------


def build_vocab(docs: Iterable[Sequence[str]], min_count: int = 1) -> Dict[str, int]:
    """
    Token → index map with 0 and 1 reserved for padding and unknown.

    Tokens are numbered by descending frequency, ties alphabetically.
    """
    counts = Counter(token for doc in docs for token in doc)
    ranked = sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))
    return {token: i + 2 for i, token in enumerate(ranked)}


def pad_sequence(tokens: Sequence[str], length: int, vocab: Mapping[str, int]) -> List[int]:
    """
    Index a token list and fit it to ``length``.

    Long inputs keep their first ``length`` tokens; short inputs are padded
    on the left with 0. Unknown tokens map to 1.
    """
    indices = [vocab.get(token, UNK_INDEX) for token in tokens[:length]]
    return [PAD_INDEX] * (length - len(indices)) + indices


def pad_batch(docs: Sequence[Sequence[str]], length: int, vocab: Mapping[str, int]) -> np.ndarray:
    """Stack padded sequences into an int64 matrix."""
    if not docs:
        return np.zeros((0, length), dtype=np.int64)
    return np.array([pad_sequence(doc, length, vocab) for doc in docs], dtype=np.int64)


def load_embeddings(path: str | Path, dim: Optional[int] = None) -> Dict[str, np.ndarray]:
    """
    Read a text word-vector file (``token v1 ... vd`` per line).

    A leading ``count dim`` header line is skipped; lines with the wrong
    number of values are skipped with a warning.

    Args:
        path: Vector file.
        dim: Expected dimension; taken from the first vector if omitted.

    Returns:
        Mapping token → float64 vector.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Embedding file not found: {path}")

    vectors: Dict[str, np.ndarray] = {}
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f):
            parts = line.rstrip("\n").rstrip().split(" ")
            if line_no == 0 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            if len(parts) < 2:
                skipped += 1
                continue
            try:
                vector = np.asarray(parts[1:], dtype=np.float64)
            except ValueError:
                skipped += 1
                continue
            if dim is None:
                dim = vector.shape[0]
            if vector.shape[0] != dim or not np.all(np.isfinite(vector)):
                skipped += 1
                continue
            vectors.setdefault(parts[0], vector)

    if skipped:
        print(f"[⚠️ Warning] Skipped {skipped:,} malformed vectors in {path.name}")
    print(f"[✅] Loaded {len(vectors):,} word vectors (d={dim}) from {path.name}.")
    return vectors


def init_parameters(
    vocab: Mapping[str, int],
    embed_dim: int,
    hidden: int,
    seed: int,
    embeddings: Optional[Mapping[str, np.ndarray]] = None,
) -> LstmParameters:
    """
    Seeded initial parameters.

    Embedding rows come from ``embeddings`` where available, otherwise from
    uniform(-0.05, 0.05); the padding row is zero. Gate weights are Glorot
    uniform, the forget-gate bias starts at 1.

    Args:
        vocab: Token → index map (indices ≥ 2).
        embed_dim: Embedding dimension d.
        hidden: Hidden size h.
        seed: Seed.
        embeddings: Pretrained vectors of dimension d.

    Returns:
        LstmParameters.
    """
    rng = make_rng(seed, 1)
    vocab_size = max(vocab.values(), default=UNK_INDEX) + 1

    E = rng.uniform(-0.05, 0.05, size=(vocab_size, embed_dim))
    E[PAD_INDEX] = 0.0
    if embeddings:
        hits = 0
        for token, index in vocab.items():
            vector = embeddings.get(token)
            if vector is not None and vector.shape == (embed_dim,):
                E[index] = vector
                hits += 1
        print(f"[✅] Pretrained vectors cover {hits:,} of {len(vocab):,} tokens.")

    def glorot(rows: int, cols: int) -> np.ndarray:
        bound = np.sqrt(6.0 / (rows + cols))
        return rng.uniform(-bound, bound, size=(rows, cols))

    arrays: Dict[str, np.ndarray] = {"E": E}
    for g in GATES:
        arrays[f"W_{g}"] = glorot(embed_dim, hidden)
    for g in GATES:
        arrays[f"U_{g}"] = glorot(hidden, hidden)
    for g in GATES:
        arrays[f"b_{g}"] = np.ones(hidden) if g == "f" else np.zeros(hidden)
    arrays["w_out"] = rng.uniform(-np.sqrt(6.0 / (hidden + 1)), np.sqrt(6.0 / (hidden + 1)), size=hidden)
    arrays["b_out"] = np.zeros(1)
    return LstmParameters(**arrays)


# ---------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _as_batch(indices: Sequence[int] | np.ndarray) -> np.ndarray:
    X = np.asarray(indices, dtype=np.int64)
    return X[None, :] if X.ndim == 1 else X


def _forward(
    params: LstmParameters,
    X: np.ndarray,
    drop_mask: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, Dict[str, object]]:
    """Batched forward pass returning logits, probabilities and the cache."""
    B, T = X.shape
    h = np.zeros((B, params.hidden))
    c = np.zeros((B, params.hidden))
    steps = []

    for t in range(T):
        x = params.E[X[:, t]]
        m = (X[:, t] != PAD_INDEX).astype(np.float64)[:, None]

        i = sigmoid(x @ params.W_i + h @ params.U_i + params.b_i)
        f = sigmoid(x @ params.W_f + h @ params.U_f + params.b_f)
        o = sigmoid(x @ params.W_o + h @ params.U_o + params.b_o)
        g = np.tanh(x @ params.W_g + h @ params.U_g + params.b_g)

        c_new = f * c + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c

        steps.append((x, m, h, c, i, f, o, g, tanh_c))
        c = m * c_new + (1.0 - m) * c
        h = m * h_new + (1.0 - m) * h

    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(c))):
        raise NumericError("Non-finite LSTM state; check initialization and learning rate")

    h_last = h if drop_mask is None else h * drop_mask
    logits = h_last @ params.w_out + params.b_out[0]
    probs = sigmoid(logits)
    if not np.all(np.isfinite(probs)):
        raise NumericError("Non-finite LSTM output")

    cache = {"X": X, "steps": steps, "h_last": h_last, "drop_mask": drop_mask}
    return logits, probs, cache


def lstm_forward(params: LstmParameters, indices: Sequence[int] | np.ndarray) -> float | np.ndarray:
    """
    Probability of the positive class (no dropout).

    Args:
        params: Model parameters.
        indices: One padded index sequence, or a ``(batch, T)`` matrix.

    Returns:
        A float for one sequence, an array for a batch.

    Raises:
        NumericError: If any state or output is non-finite.
    """
    X = np.asarray(indices, dtype=np.int64)
    _, probs, _ = _forward(params, _as_batch(X))
    return float(probs[0]) if X.ndim == 1 else probs


def bce_loss(logits: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy computed from logits."""
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def loss_and_gradients(
    params: LstmParameters,
    X: np.ndarray,
    y: np.ndarray,
    drop_mask: Optional[np.ndarray] = None,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean BCE over a batch and its gradient for every parameter array.

    Args:
        params: Model parameters.
        X: ``(batch, T)`` padded indices.
        y: Labels in {0, 1}.
        drop_mask: Scaled dropout mask applied to the final state.

    Returns:
        ``(loss, grads)`` with ``grads`` keyed like :meth:`LstmParameters.arrays`.
    """
    X = _as_batch(X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    logits, probs, cache = _forward(params, X, drop_mask)
    loss = bce_loss(logits, y)

    grads = {name: np.zeros_like(arr) for name, arr in params.arrays().items()}
    B = X.shape[0]

    dz = (probs - y) / B
    grads["w_out"] = cache["h_last"].T @ dz
    grads["b_out"] = np.array([dz.sum()])

    dh = dz[:, None] * params.w_out[None, :]
    if drop_mask is not None:
        dh = dh * drop_mask
    dc = np.zeros_like(dh)

    W = {g: getattr(params, f"W_{g}") for g in GATES}
    U = {g: getattr(params, f"U_{g}") for g in GATES}

    for t in range(X.shape[1] - 1, -1, -1):
        x, m, h_prev, c_prev, i, f, o, g, tanh_c = cache["steps"][t]

        dh_new = m * dh
        dc_new = m * dc + dh_new * o * (1.0 - tanh_c**2)

        dpre = {
            "i": dc_new * g * i * (1.0 - i),
            "f": dc_new * c_prev * f * (1.0 - f),
            "o": dh_new * tanh_c * o * (1.0 - o),
            "g": dc_new * i * (1.0 - g**2),
        }

        dx = np.zeros_like(x)
        dh_prev = (1.0 - m) * dh
        for gate, d in dpre.items():
            grads[f"W_{gate}"] += x.T @ d
            grads[f"U_{gate}"] += h_prev.T @ d
            grads[f"b_{gate}"] += d.sum(axis=0)
            dx += d @ W[gate].T
            dh_prev += d @ U[gate].T

        np.add.at(grads["E"], X[:, t], dx)
        dc = dc_new * f + (1.0 - m) * dc
        dh = dh_prev

    grads["E"][PAD_INDEX] = 0.0
    return loss, grads


# ---------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------


BackwardFn = Callable[[LstmParameters, np.ndarray, np.ndarray], Tuple[float, Dict[str, np.ndarray]]]


def gradient_check(
    params: LstmParameters,
    example: Tuple[Sequence[int], int],
    epsilon: float = 1e-5,
    backward: Optional[BackwardFn] = None,
) -> float:
    """
    Largest relative error between analytic and central-difference gradients.

    Every entry of every parameter array is perturbed by ±epsilon. The error
    per entry is ``|g_a − g_n| / max(|g_a| + |g_n|, 1e-8)``.

    Args:
        params: Parameters (left unchanged).
        example: ``(indices, label)``.
        epsilon: Finite-difference step.
        backward: Gradient function to verify; defaults to the model's own.

    Returns:
        Maximum relative error.
    """
    backward = backward or (lambda p, X, y: loss_and_gradients(p, X, y))
    X = _as_batch(example[0])
    y = np.array([float(example[1])])

    _, analytic = backward(params, X, y)
    probe = params.copy()

    def loss_at() -> float:
        logits, _, _ = _forward(probe, X)
        return bce_loss(logits, y)

    worst = 0.0
    for name, arr in probe.arrays().items():
        for idx in np.ndindex(arr.shape):
            original = arr[idx]
            arr[idx] = original + epsilon
            plus = loss_at()
            arr[idx] = original - epsilon
            minus = loss_at()
            arr[idx] = original

            numeric = (plus - minus) / (2.0 * epsilon)
            exact = analytic[name][idx]
            error = abs(exact - numeric) / max(abs(exact) + abs(numeric), 1e-8)
            worst = max(worst, error)

    return worst


# ---------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------


def train_lstm(
    params: LstmParameters,
    X: np.ndarray,
    y: np.ndarray,
    config: LstmConfig,
    seed: int,
    quiet: bool = True,
) -> Tuple[LstmParameters, List[float]]:
    """
    Minibatch gradient descent with dropout on the final hidden state.

    Batches are reshuffled every epoch from a seeded stream, so a fixed
    seed reproduces the loss curve exactly.

    Args:
        params: Initial parameters (not modified).
        X: ``(n, T)`` padded indices.
        y: Labels in {0, 1}.
        config: Hyperparameters.
        seed: Seed for shuffling and dropout.
        quiet: Disable the progress bar.

    Returns:
        Trained parameters and the mean training loss of every epoch.

    Raises:
        NumericError: If the loss or a parameter becomes non-finite.
    """
    X = np.asarray(X, dtype=np.int64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("Cannot train on an empty dataset")

    model = params.copy()
    curve: List[float] = []
    keep = 1.0 - config.dropout

    for epoch in tqdm(range(config.epochs), desc="LSTM epochs", disable=quiet):
        rng = make_rng(seed, 2, epoch)
        order = rng.permutation(len(X))
        losses: List[float] = []

        for start in range(0, len(order), config.batch):
            batch = order[start : start + config.batch]
            mask = None
            if config.dropout > 0:
                mask = (rng.random((len(batch), model.hidden)) < keep) / keep

            loss, grads = loss_and_gradients(model, X[batch], y[batch], mask)
            if not np.isfinite(loss):
                raise NumericError(f"Loss diverged at epoch {epoch + 1}; lower the learning rate")

            for name, arr in model.arrays().items():
                arr -= config.lr * grads[name]
            losses.append(loss * len(batch))

        curve.append(float(sum(losses) / len(X)))
        if not np.isfinite(curve[-1]) or not model.is_finite():
            raise NumericError(f"Non-finite parameters after epoch {epoch + 1}; lower the learning rate")

    return model, curve


def predict(params: LstmParameters, X: np.ndarray, batch: int = 256) -> np.ndarray:
    """Positive-class probabilities (dropout off)."""
    X = np.asarray(X, dtype=np.int64)
    if len(X) == 0:
        return np.zeros(0)
    return np.concatenate([_forward(params, X[s : s + batch])[1] for s in range(0, len(X), batch)])


def evaluate(params: LstmParameters, X: np.ndarray, y: np.ndarray) -> float:
    """Accuracy at the 0.5 cut-off."""
    y = np.asarray(y)
    if len(y) == 0:
        return 0.0
    return float(np.mean((predict(params, X) >= 0.5).astype(int) == y))


# ---------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------


def save_checkpoint(params: LstmParameters, path: str | Path) -> Path:
    """
    Write parameters as a flat binary.

    Layout: little-endian int64 header ``[n_arrays, (ndim, dims...)...]``
    followed by every array as row-major float64, in parameter order.
    """
    arrays = list(params.arrays().values())
    header: List[int] = [len(arrays)]
    for arr in arrays:
        header.append(arr.ndim)
        header.extend(arr.shape)

    path = ensure_parent(path)
    with open(path, "wb") as f:
        f.write(np.asarray(header, dtype="<i8").tobytes())
        for arr in arrays:
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return path


def load_checkpoint(path: str | Path) -> LstmParameters:
    """Read a checkpoint written by :func:`save_checkpoint`."""
    raw = Path(path).read_bytes()
    pos = 0

    def read_int() -> int:
        nonlocal pos
        value = int(np.frombuffer(raw, dtype="<i8", count=1, offset=pos)[0])
        pos += 8
        return value

    n_arrays = read_int()
    if n_arrays != len(PARAM_NAMES):
        raise ValueError(f"Checkpoint holds {n_arrays} arrays, expected {len(PARAM_NAMES)}")

    shapes = []
    for _ in range(n_arrays):
        ndim = read_int()
        shapes.append(tuple(read_int() for _ in range(ndim)))

    arrays = {}
    for name, shape in zip(PARAM_NAMES, shapes):
        count = int(np.prod(shape))
        arrays[name] = np.frombuffer(raw, dtype="<f8", count=count, offset=pos).reshape(shape).astype(np.float64)
        pos += 8 * count

    if pos != len(raw):
        raise ValueError("Checkpoint has trailing bytes")
    return LstmParameters(**arrays)


if __name__ == "__main__":
    vocab = build_vocab([["stay", "safe"], ["pray", "for", "florida"]])
    demo = init_parameters(vocab, embed_dim=4, hidden=3, seed=42)
    seq = pad_sequence(["stay", "safe", "florida"], 6, vocab)

    print("=== lstm demo ===")
    print(seq, lstm_forward(demo, seq))
    print("max relative gradient error:", gradient_check(demo, (seq, 1)))
