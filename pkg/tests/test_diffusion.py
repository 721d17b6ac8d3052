import re
import xml.etree.ElementTree as ET
from collections import Counter
from datetime import date

import numpy as np
import pytest

from analysis.diffusion import (
    bin_by_day,
    bubble_cells,
    default_threshold,
    emit_diffusion,
    filter_threshold,
    load_diffusion_csv,
    order_by_sentiment,
    to_frame,
)
from analysis.emojis import emoji_keys
from models.entities import DiffusionRow, DiffusionSeries, EmojiSentimentEntry
from utils.plot_utils import CREATOR

from conftest import scaled


POOL = ["🙏", "❤️", "💔", "🇫🇷", "🌀", "😢"]


def random_tweets(make_tweet, rng, n):
    tweets = []
    for i in range(n):
        picks = rng.integers(0, len(POOL), size=int(rng.integers(0, 6)))
        day = int(rng.integers(6, 13))
        hour = int(rng.integers(0, 24))
        tweets.append(make_tweet(str(i), "".join(POOL[j] for j in picks), when=f"2017-09-{day:02d}T{hour:02d}:00:00Z"))
    return tweets


def random_series(rng):
    n_days = int(rng.integers(1, 8))
    days = [date(2017, 9, 1 + d) for d in range(n_days)]
    rows = [
        DiffusionRow(key=chr(0x1F600 + i), score=0.0, counts=tuple(int(c) for c in rng.integers(0, 60, size=n_days)))
        for i in range(int(rng.integers(0, 10)))
    ]
    return DiffusionSeries(days=days, rows=rows)


def sentiment_table(scores):
    return {
        key: EmojiSentimentEntry(key=key, n_neg=None, n_neut=None, n_pos=None, n_total=None, score=score)
        for key, score in scores.items()
    }


def test_seven_day_span_with_zero_days(make_tweet):
    tweets = [
        make_tweet("1", "🙏🙏", when="2017-09-06T10:00:00Z"),
        make_tweet("2", "🙏❤️", when="2017-09-12T23:59:59Z"),
    ]
    series = bin_by_day(tweets, subset={"event": "irma"})

    assert [d.isoformat() for d in series.days][0] == "2017-09-06"
    assert len(series.days) == 7
    rows = {row.key: row.counts for row in series.rows}
    assert rows["🙏"] == (2, 0, 0, 0, 0, 0, 1)
    assert rows["❤"] == (0, 0, 0, 0, 0, 0, 1)
    assert series.subset == {"event": "irma"}


def test_timezone_offset_moves_days(make_tweet):
    tweets = [make_tweet("1", "🙏", when="2017-09-07T02:00:00Z")]
    assert bin_by_day(tweets).days == [date(2017, 9, 7)]
    assert bin_by_day(tweets, tz_offset=-5).days == [date(2017, 9, 6)]


def test_empty_inputs(make_tweet):
    assert len(bin_by_day([])) == 0
    no_emoji = bin_by_day([make_tweet("1", "calm")])
    assert no_emoji.rows == [] and len(no_emoji.days) == 1


def test_conservation_against_totals(make_tweet):
    rng = np.random.default_rng(21)
    for trial in range(scaled(50, 1000)):
        tweets = random_tweets(make_tweet, rng, int(rng.integers(1, 40)))
        series = bin_by_day(tweets, threads=1 + trial % 3)
        assert series.total() == sum(len(emoji_keys(t.text)) for t in tweets)

        per_key = Counter(k for t in tweets for k in emoji_keys(t.text))
        assert {row.key: sum(row.counts) for row in series.rows} == dict(per_key)


def test_threshold_composition():
    rng = np.random.default_rng(5)
    for _ in range(scaled(300, 1000)):
        series = random_series(rng)
        a, b = (int(x) for x in rng.integers(0, 60, size=2))
        for mode in ("max-day", "all-days"):
            twice = filter_threshold(filter_threshold(series, a, mode), b, mode)
            once = filter_threshold(series, max(a, b), mode)
            assert twice.rows == once.rows
            assert twice.threshold == once.threshold == max(a, b)
            assert all(max(row.counts) >= max(a, b) for row in filter_threshold(series, max(a, b)).rows)


def test_threshold_modes():
    series = DiffusionSeries(
        days=[date(2017, 9, 6), date(2017, 9, 7)],
        rows=[DiffusionRow("a", 0.0, (60, 1)), DiffusionRow("b", 0.0, (50, 50)), DiffusionRow("c", 0.0, (10, 10))],
    )
    assert [r.key for r in filter_threshold(series, 50).rows] == ["a", "b"]
    assert [r.key for r in filter_threshold(series, 50, "all-days").rows] == ["b"]
    with pytest.raises(ValueError):
        filter_threshold(series, -1)
    assert default_threshold("irma") == 50 and default_threshold("paris") == 25
    assert default_threshold("unknown") == 0


def test_order_by_sentiment_is_a_permutation():
    rng = np.random.default_rng(8)
    for _ in range(scaled(300, 1000)):
        series = random_series(rng)
        scores = {row.key: float(rng.choice([-0.5, 0.0, 0.25, 0.9])) for row in series.rows if rng.random() < 0.7}
        ordered = order_by_sentiment(series, sentiment_table(scores))

        assert Counter((r.key, r.counts) for r in ordered.rows) == Counter((r.key, r.counts) for r in series.rows)
        keys = [(-r.score, r.key) for r in ordered.rows]
        assert keys == sorted(keys)
        assert all(r.score == scores.get(r.key, 0.0) for r in ordered.rows)


def test_unscored_emojis_print_a_warning(capsys):
    series = DiffusionSeries(
        days=[date(2017, 9, 6)],
        rows=[DiffusionRow("🙏", 0.0, (3,)), DiffusionRow("🌀", 0.0, (2,))],
    )
    ordered = order_by_sentiment(series, sentiment_table({"🙏": 0.6}))

    assert [row.key for row in ordered.rows] == ["🙏", "🌀"]
    out = capsys.readouterr().out
    assert "[⚠️ Warning] 1 emojis have no sentiment score; using 0." in out
    assert "[WARN]" not in out


def test_csv_round_trip(tmp_path, make_tweet):
    tweets = random_tweets(make_tweet, np.random.default_rng(3), 50)
    series = order_by_sentiment(bin_by_day(tweets), sentiment_table({"🙏": 0.4, "💔": -0.3}))
    path = emit_diffusion(series, tmp_path / "diffusion.csv", "csv")

    header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
    assert header[:2] == ["emoji", "sentiment"]
    assert header[2:] == series.day_labels

    loaded = load_diffusion_csv(path)
    assert loaded.days == series.days
    assert loaded.rows == series.rows
    assert list(to_frame(series).columns) == header


def test_svg_skips_zero_cells(tmp_path):
    series = DiffusionSeries(
        days=[date(2017, 9, 6), date(2017, 9, 7), date(2017, 9, 8)],
        rows=[DiffusionRow("🙏", 0.5, (4, 0, 1)), DiffusionRow("💔", -0.2, (0, 9, 0))],
    )
    cells = bubble_cells(series)
    assert [(i, j) for i, j, _ in cells] == [(0, 0), (0, 2), (1, 1)]
    radii = {(i, j): r for i, j, r in cells}
    assert radii[(0, 2)] < radii[(0, 0)] < radii[(1, 1)]
    assert radii[(0, 0)] == pytest.approx(2 * radii[(0, 2)])

    path = emit_diffusion(series, tmp_path / "d.svg", "svg", title="Irma")
    assert ET.fromstring(path.read_bytes()).tag == "{http://www.w3.org/2000/svg}svg"
    text = path.read_text(encoding="utf-8")
    assert sorted(re.findall(r'<g id="(bubble-\d+-\d+)">', text)) == ["bubble-0-0", "bubble-0-2", "bubble-1-1"]
    assert CREATOR in text

    again = emit_diffusion(series, tmp_path / "again.svg", "svg", title="Irma")
    assert again.read_bytes() == path.read_bytes()

    with pytest.raises(ValueError):
        emit_diffusion(DiffusionSeries(days=[], rows=[]), tmp_path / "e.svg", "svg")
    with pytest.raises(ValueError):
        emit_diffusion(series, tmp_path / "d.pdf", "pdf")
