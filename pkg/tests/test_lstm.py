import math

import numpy as np
import pytest

from classifiers.lstm import (
    PAD_INDEX,
    PARAM_NAMES,
    UNK_INDEX,
    LstmConfig,
    LstmParameters,
    build_vocab,
    evaluate,
    gradient_check,
    init_parameters,
    load_checkpoint,
    load_embeddings,
    loss_and_gradients,
    lstm_forward,
    pad_batch,
    pad_sequence,
    save_checkpoint,
    train_lstm,
)
from utils.errors import NumericError

from conftest import scaled


def random_params(rng, vocab_size, d, h, std=0.5):
    params = LstmParameters.zeros(vocab_size, d, h)
    for arr in params.arrays().values():
        arr[...] = rng.normal(0.0, std, size=arr.shape)
    params.E[PAD_INDEX] = 0.0
    return params


def sig(z):
    return 1.0 / (1.0 + math.exp(-z))


# ---------------------------------------------------------------------
# Vocabulary and padding
# ---------------------------------------------------------------------


def test_build_vocab_orders_by_frequency():
    vocab = build_vocab([["b", "a", "c"], ["a", "b"], ["a"]])
    assert vocab == {"a": 2, "b": 3, "c": 4}
    assert build_vocab([["a", "a", "b"]], min_count=2) == {"a": 2}


def test_pad_sequence_left_pads_and_truncates():
    vocab = {"pray": 2, "for": 3, "paris": 4}
    assert pad_sequence(["pray", "paris"], 4, vocab) == [0, 0, 2, 4]
    assert pad_sequence(["pray", "for", "paris", "now"], 3, vocab) == [2, 3, 4]
    assert pad_sequence(["who"], 2, vocab) == [PAD_INDEX, UNK_INDEX]
    assert pad_sequence([], 2, vocab) == [0, 0]

    batch = pad_batch([["pray"], ["for", "paris"]], 3, vocab)
    assert batch.dtype == np.int64 and batch.tolist() == [[0, 0, 2], [0, 3, 4]]
    assert pad_batch([], 5, vocab).shape == (0, 5)


def test_load_embeddings_skips_header_and_bad_rows(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("3 2\npray 0.1 0.2\nbad 0.3\nhope 1 nan\nparis -1 2\n", encoding="utf-8")
    vectors = load_embeddings(path)
    assert set(vectors) == {"pray", "paris"}
    assert vectors["paris"].tolist() == [-1.0, 2.0]

    with pytest.raises(FileNotFoundError):
        load_embeddings(tmp_path / "missing.txt")


def test_init_parameters_shapes_and_pretrained_rows():
    vocab = {"pray": 2, "hope": 3}
    params = init_parameters(vocab, 4, 3, seed=5, embeddings={"hope": np.full(4, 0.7)})
    assert params.E.shape == (4, 4)
    assert np.all(params.E[PAD_INDEX] == 0.0)
    assert np.all(params.E[3] == 0.7)
    assert np.all(params.b_f == 1.0) and np.all(params.b_i == 0.0)
    assert params.U_g.shape == (3, 3) and params.w_out.shape == (3,)

    again = init_parameters(vocab, 4, 3, seed=5, embeddings={"hope": np.full(4, 0.7)})
    for name in PARAM_NAMES:
        assert np.array_equal(getattr(params, name), getattr(again, name))


# ---------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------


def test_zero_network_outputs_one_half():
    params = LstmParameters.zeros(5, 3, 4)
    assert lstm_forward(params, [2, 3, 4]) == pytest.approx(0.5)

    params.b_out[0] = 1.3
    assert lstm_forward(params, [2, 3, 4]) == pytest.approx(sig(1.3))


def test_scalar_network_matches_hand_computation():
    params = LstmParameters.zeros(3, 1, 1)
    params.E[1, 0], params.E[2, 0] = 0.5, -1.2
    weights = {"i": (0.3, -0.4, 0.1), "f": (0.8, 0.2, 1.0), "o": (-0.6, 0.9, 0.0), "g": (1.1, 0.5, -0.2)}
    for gate, (w, u, b) in weights.items():
        getattr(params, f"W_{gate}")[0, 0] = w
        getattr(params, f"U_{gate}")[0, 0] = u
        getattr(params, f"b_{gate}")[0] = b
    params.w_out[0], params.b_out[0] = 1.7, -0.3

    h = c = 0.0
    for x in (0.5, -1.2):
        pre = {gate: w * x + u * h + b for gate, (w, u, b) in weights.items()}
        i, f, o = sig(pre["i"]), sig(pre["f"]), sig(pre["o"])
        g = math.tanh(pre["g"])
        c = f * c + i * g
        h = o * math.tanh(c)
    expected = sig(1.7 * h - 0.3)

    assert lstm_forward(params, [0, 1, 2]) == pytest.approx(expected, abs=1e-12)


def test_leading_padding_does_not_change_output():
    params = random_params(np.random.default_rng(2), 6, 3, 4)
    short = lstm_forward(params, [3, 5, 2])
    assert lstm_forward(params, [0, 0, 0, 3, 5, 2]) == pytest.approx(short, abs=1e-15)

    batch = lstm_forward(params, np.array([[0, 3, 5, 2], [3, 5, 2, 4]]))
    assert batch.shape == (2,)
    assert batch[0] == pytest.approx(short, abs=1e-15)


def test_non_finite_values_raise():
    params = LstmParameters.zeros(4, 2, 2)
    params.E[2, 0] = np.nan
    with pytest.raises(NumericError):
        lstm_forward(params, [2, 3])


# ---------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------


def test_gradient_check_on_random_small_networks():
    rng = np.random.default_rng(13)
    for _ in range(scaled(20, 200)):
        d, h, T = (int(v) for v in (rng.integers(2, 5), rng.integers(2, 5), rng.integers(3, 7)))
        params = random_params(rng, 6, d, h)
        indices = [int(v) for v in rng.integers(1, 6, size=T)]
        indices[0] = PAD_INDEX
        label = int(rng.integers(0, 2))

        assert gradient_check(params, (indices, label)) < 1e-4


def test_gradient_check_catches_a_wrong_backward_pass():
    params = random_params(np.random.default_rng(4), 6, 3, 3)

    def skewed(p, X, y):
        loss, grads = loss_and_gradients(p, X, y)
        grads["w_out"] = grads["w_out"] * 1.5
        return loss, grads

    assert gradient_check(params, ([2, 3, 4, 5], 1), backward=skewed) > 1e-2


def test_gradient_check_on_zero_network():
    params = LstmParameters.zeros(5, 2, 2)
    assert gradient_check(params, ([2, 3, 4], 0)) < 1e-4


def test_padding_row_gets_no_gradient():
    params = random_params(np.random.default_rng(6), 6, 3, 3)
    _, grads = loss_and_gradients(params, np.array([[0, 0, 2, 3]]), np.array([1]))
    assert np.all(grads["E"][PAD_INDEX] == 0.0)
    assert set(grads) == set(PARAM_NAMES)


# ---------------------------------------------------------------------
# Training and checkpoints
# ---------------------------------------------------------------------


def overfit_data(rng):
    noise = ["storm", "news", "wind", "rain", "city", "road"]
    docs = [list(rng.choice(noise, size=int(rng.integers(2, 6)))) + ["pray" if i % 2 else "blame"] for i in range(50)]
    y = np.array([i % 2 for i in range(50)])
    return docs, y


def test_overfits_a_small_separable_set():
    docs, y = overfit_data(np.random.default_rng(0))
    config = LstmConfig(hidden=8, embed_dim=8, epochs=200, batch=10, lr=0.5, dropout=0.0, pad_length=10)
    vocab = build_vocab(docs)
    X = pad_batch(docs, config.pad_length, vocab)

    params = init_parameters(vocab, config.embed_dim, config.hidden, seed=1)
    trained, curve = train_lstm(params, X, y, config, seed=1)

    assert evaluate(trained, X, y) == 1.0
    assert curve[-1] < curve[0]
    assert len(curve) == 200


def test_training_is_reproducible():
    docs, y = overfit_data(np.random.default_rng(1))
    config = LstmConfig(hidden=4, embed_dim=4, epochs=5, batch=7, lr=0.2, dropout=0.5, pad_length=8)
    vocab = build_vocab(docs)
    X = pad_batch(docs, config.pad_length, vocab)
    params = init_parameters(vocab, config.embed_dim, config.hidden, seed=2)

    first, curve_a = train_lstm(params, X, y, config, seed=3)
    second, curve_b = train_lstm(params, X, y, config, seed=3)
    assert curve_a == curve_b
    assert np.array_equal(first.w_out, second.w_out)
    assert not np.array_equal(first.w_out, params.w_out)

    with pytest.raises(ValueError):
        train_lstm(params, X[:0], y[:0], config, seed=3)


def test_checkpoint_round_trip(tmp_path):
    params = random_params(np.random.default_rng(8), 7, 3, 5)
    path = save_checkpoint(params, tmp_path / "model" / "lstm.bin")
    loaded = load_checkpoint(path)
    for name in PARAM_NAMES:
        assert np.array_equal(getattr(loaded, name), getattr(params, name))

    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_config_validation():
    with pytest.raises(ValueError):
        LstmConfig(hidden=0)
    with pytest.raises(ValueError):
        LstmConfig(dropout=1.0)
    with pytest.raises(ValueError):
        LstmConfig(lr=0.0)
