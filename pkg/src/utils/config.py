"""
Configuration loading for the analytics pipeline.

Values resolve in this order: command-line overrides, then a KEY=VALUE
config file (``--config``), then the process environment (``.env`` is
loaded first), then the defaults below.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values, load_dotenv


load_dotenv()

TOOL_VERSION = "1.0.0"

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DATA_DIR = PROJECT_ROOT / "data"


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved settings snapshot shared by every stage."""

    seed: int = 42
    out_dir: str = "output"
    threads: int = 1
    event: str = "irma"
    stopwords_path: str = str(DATA_DIR / "stopwords_en.txt")
    gazetteer_path: str = str(DATA_DIR / "gazetteer.tsv")
    min_kappa: Optional[float] = None
    top_k: int = 10
    threshold: Optional[int] = None
    threshold_mode: str = "max-day"
    tz_offset: float = 0.0
    pair_mode: str = "presence"
    min_edge_weight: int = 1
    features: str = "tfidf"
    balance: str = "undersample"
    lstm_hidden: int = 64
    lstm_embed_dim: int = 50
    lstm_epochs: int = 20
    lstm_batch: int = 25
    lstm_lr: float = 0.001
    lstm_dropout: float = 0.5
    pad_length: int = 100
    quiet: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Return the snapshot as a plain dictionary."""
        return asdict(self)


_CHOICES = {
    "threshold_mode": {"max-day", "all-days"},
    "pair_mode": {"presence", "occurrences"},
    "features": {"bigram", "tfidf", "tfidf+bigram"},
    "balance": {"undersample", "oversample", "none"},
}


def _coerce(name: str, raw: Any, default: Any) -> Any:
    """Convert a raw string value to the type of the field default."""
    if raw is None:
        return None
    if not isinstance(raw, str):
        return raw

    value = raw.strip()
    if isinstance(default, bool):
        return value.lower() in {"1", "true", "yes", "on"}
    if isinstance(default, int) or name == "threshold":
        return int(value)
    if isinstance(default, float) or name == "min_kappa":
        return float(value)
    return value


def load_config(
    config_path: Optional[str | Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
    """
    Build a PipelineConfig from defaults, environment, file and overrides.

    Args:
        config_path: Optional KEY=VALUE file (keys are upper-case field names).
        overrides: Field-name mapping from the command line; ``None`` values
                   are ignored.

    Returns:
        Frozen configuration snapshot.

    Raises:
        FileNotFoundError: If ``config_path`` does not exist.
        ValueError: If a value fails to convert or is not an allowed choice.
    """
    file_values: Dict[str, Optional[str]] = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        file_values = {k.upper(): v for k, v in dotenv_values(path).items()}

    overrides = overrides or {}
    resolved: Dict[str, Any] = {}

    for field in fields(PipelineConfig):
        default = field.default
        key = field.name.upper()

        raw: Any = overrides.get(field.name)
        if raw is None:
            raw = file_values.get(key)
        if raw is None:
            raw = os.getenv(key)
        if raw is None:
            resolved[field.name] = default
            continue

        try:
            resolved[field.name] = _coerce(field.name, raw, default)
        except ValueError as exc:
            raise ValueError(f"Invalid value for {key}: {raw!r}") from exc

    for name, allowed in _CHOICES.items():
        if resolved[name] not in allowed:
            raise ValueError(
                f"{name.upper()} must be one of {sorted(allowed)}, "
                f"got {resolved[name]!r}"
            )

    if resolved["threads"] < 1:
        raise ValueError("THREADS must be a positive integer")

    return PipelineConfig(**resolved)


if __name__ == "__main__":
    from pprint import pprint

    print("=== config demo ===")
    pprint(load_config(overrides={"seed": 7, "event": "paris"}).to_dict())
    print("[✅] config loaded successfully.")
