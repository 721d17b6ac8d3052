from dataclasses import fields

import pytest

from utils.config import PipelineConfig, load_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for field in fields(PipelineConfig):
        monkeypatch.delenv(field.name.upper(), raising=False)


def test_defaults():
    config = load_config()
    assert config.seed == 42
    assert config.threads == 1
    assert config.min_kappa is None
    assert config.threshold is None
    assert config.pair_mode == "presence"
    assert config.lstm_hidden == 64 and config.pad_length == 100


def test_precedence_flag_over_file_over_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SEED", "1")
    monkeypatch.setenv("TOP_K", "3")
    monkeypatch.setenv("EVENT", "paris")

    settings = tmp_path / "run.env"
    settings.write_text("SEED=2\nTOP_K=5\nMIN_KAPPA=0.7\nQUIET=true\n", encoding="utf-8")

    config = load_config(settings, overrides={"seed": 3, "threshold": None})
    assert config.seed == 3
    assert config.top_k == 5
    assert config.event == "paris"
    assert config.min_kappa == pytest.approx(0.7)
    assert config.quiet is True
    assert config.threshold is None


def test_invalid_choice_and_threads(monkeypatch):
    with pytest.raises(ValueError):
        load_config(overrides={"pair_mode": "cliques"})
    with pytest.raises(ValueError):
        load_config(overrides={"threads": 0})
    monkeypatch.setenv("TOP_K", "ten")
    with pytest.raises(ValueError):
        load_config()


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.env")


def test_snapshot_is_plain_dict():
    snapshot = load_config(overrides={"event": "paris"}).to_dict()
    assert snapshot["event"] == "paris"
    assert set(snapshot) == {f.name for f in fields(PipelineConfig)}
