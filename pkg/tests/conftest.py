"""
Shared pytest fixtures.

Puts ``src/`` on ``sys.path`` the same way running ``python src/main.py``
does, so tests import ``analysis``, ``utils`` and friends as top-level
modules.
"""

import os
import sys
from pathlib import Path

import pytest

SRC_DIR = Path(__file__).resolve().parents[1] / "src"
if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))

from models.entities import LabeledCorpus, TweetRecord  # noqa: E402
from analysis.corpus import extract_hashtags  # noqa: E402
from utils.date_utils import parse_timestamp  # noqa: E402


STRESS = os.getenv("STRESS", "0").strip().lower() in {"1", "true", "yes"}


def scaled(default: int, stress: int) -> int:
    """Trial count for property loops (larger with STRESS=1)."""
    return stress if STRESS else default


@pytest.fixture
def make_tweet():
    """Factory for TweetRecord objects with sensible defaults."""

    def _make(
        id: str,
        text: str,
        when: str = "2017-09-07T12:00:00Z",
        location=None,
        retweet: bool = False,
    ) -> TweetRecord:
        return TweetRecord(
            id=str(id),
            text=text,
            created_at=parse_timestamp(when),
            user_location=location,
            hashtags=extract_hashtags(text),
            is_retweet=retweet,
        )

    return _make


@pytest.fixture
def make_corpus(make_tweet):
    """Build a LabeledCorpus from two lists of texts."""

    def _make(solidarity, not_solidarity, event_tag: str = "irma") -> LabeledCorpus:
        return LabeledCorpus(
            solidarity=[make_tweet(f"s{i}", text) for i, text in enumerate(solidarity)],
            not_solidarity=[make_tweet(f"n{i}", text) for i, text in enumerate(not_solidarity)],
            event_tag=event_tag,
        )

    return _make
