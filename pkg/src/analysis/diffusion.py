"""
Emoji diffusion over an event timeline.

Counts emoji occurrences per calendar day, keeps emojis that reach a
per-day frequency threshold, orders them by sentiment score and emits the
matrix as a CSV or a bubble chart SVG.
"""

from __future__ import annotations

import math
from collections import Counter
from datetime import date
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
from matplotlib.patches import Circle

from analysis.emojis import emoji_keys, sentiment_of
from models.entities import DiffusionRow, DiffusionSeries, EmojiSentimentEntry, TweetRecord
from utils.date_utils import DATE_FMT, day_of, day_span, to_day_str
from utils.io_utils import ensure_parent
from utils.parallel import parallel_count
from utils.plot_utils import new_canvas, save_svg


THRESHOLD_MODES = ("max-day", "all-days")
EMIT_FORMATS = ("csv", "svg")

CHART_LEFT, CHART_TOP = 80.0, 60.0
COL_W, ROW_H = 70.0, 34.0

DEFAULT_THRESHOLDS = {"irma": 50, "paris": 25}


def default_threshold(event_tag: str) -> int:
    """Per-day frequency threshold for an event (0 when none is known)."""
    return DEFAULT_THRESHOLDS.get(event_tag, 0)


def bin_by_day(
    records: Sequence[TweetRecord],
    tz_offset: float = 0.0,
    threads: int = 1,
    subset: Optional[Dict[str, str]] = None,
) -> DiffusionSeries:
    """
    Emoji × day occurrence matrix.

    The day axis covers every calendar day from the earliest to the latest
    tweet (after the offset), with explicit zeros. Rows come out in key
    order with a neutral score.

    Args:
        records: Tweets.
        tz_offset: Hours added to UTC before taking the date.
        threads: Worker count.
        subset: Descriptor of the subset (event, class, region).

    Returns:
        Unfiltered DiffusionSeries; empty if there are no records.
    """
    subset = dict(subset or {})
    if not records:
        return DiffusionSeries(days=[], rows=[], threshold=0, subset=subset)

    tweet_days = [day_of(record.created_at, tz_offset) for record in records]
    days = day_span(min(tweet_days), max(tweet_days))

    def count_chunk(chunk: Sequence[TweetRecord]) -> Counter:
        cells: Counter = Counter()
        for record in chunk:
            day = day_of(record.created_at, tz_offset)
            for key in emoji_keys(record.text):
                cells[(key, day)] += 1
        return cells

    cells = parallel_count(list(records), count_chunk, threads=threads)
    if not cells:
        return DiffusionSeries(days=days, rows=[], threshold=0, subset=subset)

    matrix = (
        pd.Series(cells)
        .unstack(fill_value=0)
        .reindex(columns=days, fill_value=0)
        .sort_index()
        .astype("int64")
    )

    rows = [
        DiffusionRow(key=str(key), score=0.0, counts=tuple(int(v) for v in values))
        for key, values in zip(matrix.index, matrix.to_numpy())
    ]
    return DiffusionSeries(days=days, rows=rows, threshold=0, subset=subset)


def filter_threshold(
    series: DiffusionSeries,
    min_per_day: int,
    mode: str = "max-day",
) -> DiffusionSeries:
    """
    Keep rows that reach ``min_per_day``.

    ``max-day`` keeps a row whose busiest day reaches the threshold;
    ``all-days`` needs every day to reach it.

    Args:
        series: Input series.
        min_per_day: Threshold (≥ 0).
        mode: "max-day" or "all-days".

    Returns:
        Filtered series; the recorded threshold is the larger of the old
        and new values.
    """
    if min_per_day < 0:
        raise ValueError("min_per_day must be non-negative")
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"mode must be one of {THRESHOLD_MODES}")

    def keep(row: DiffusionRow) -> bool:
        if not row.counts:
            return min_per_day == 0
        reach = max(row.counts) if mode == "max-day" else min(row.counts)
        return reach >= min_per_day

    return DiffusionSeries(
        days=list(series.days),
        rows=[row for row in series.rows if keep(row)],
        threshold=max(series.threshold, min_per_day),
        subset=dict(series.subset),
    )


def order_by_sentiment(
    series: DiffusionSeries,
    sentiment: Dict[str, EmojiSentimentEntry],
) -> DiffusionSeries:
    """
    Attach sentiment scores and sort rows by score descending, then key.

    Emojis missing from the table score 0.
    """
    misses: Counter = Counter()
    scored = [
        DiffusionRow(key=row.key, score=sentiment_of(row.key, sentiment, misses), counts=row.counts)
        for row in series.rows
    ]
    if misses:
        print(f"[⚠️ Warning] {len(misses):,} emojis have no sentiment score; using 0.")

    return DiffusionSeries(
        days=list(series.days),
        rows=sorted(scored, key=lambda row: (-row.score, row.key)),
        threshold=series.threshold,
        subset=dict(series.subset),
    )


def to_frame(series: DiffusionSeries) -> pd.DataFrame:
    """CSV-shaped frame: ``emoji, sentiment, <day>...``."""
    frame = pd.DataFrame(
        [[row.key, row.score, *row.counts] for row in series.rows],
        columns=["emoji", "sentiment", *series.day_labels],
    )
    return frame


def bubble_cells(series: DiffusionSeries) -> List[Tuple[int, int, float]]:
    """
    Bubbles of the chart as ``(row, column, radius)``.

    Zero cells are left out. The busiest cell gets the largest radius that
    fits its grid cell.
    """
    max_radius = min(COL_W, ROW_H) / 2.0 - 1.0
    peak = max((row.peak for row in series.rows), default=0) or 1
    return [
        (i, j, max_radius * math.sqrt(count / peak))
        for i, row in enumerate(series.rows)
        for j, count in enumerate(row.counts)
        if count > 0
    ]


def _emit_svg(series: DiffusionSeries, path: Path, title: str) -> None:
    fig, ax = new_canvas(
        CHART_LEFT + COL_W * len(series.days) + 20.0,
        CHART_TOP + ROW_H * len(series.rows) + 20.0,
    )

    for j, label in enumerate(series.day_labels):
        ax.text(CHART_LEFT + COL_W * (j + 0.5), CHART_TOP - 20.0, label[5:], ha="center", fontsize=11)
    for i, row in enumerate(series.rows):
        ax.text(CHART_LEFT - 10.0, CHART_TOP + ROW_H * (i + 0.5), row.key, ha="right", va="center", fontsize=18)

    for i, j, radius in bubble_cells(series):
        center = (CHART_LEFT + COL_W * (j + 0.5), CHART_TOP + ROW_H * (i + 0.5))
        ax.add_patch(Circle(center, radius, facecolor="#60a5fa", alpha=0.7, linewidth=0, gid=f"bubble-{i}-{j}"))

    save_svg(fig, path, title=title)


def emit_diffusion(
    series: DiffusionSeries,
    path: str | Path,
    fmt: str = "csv",
    title: str = "Emoji diffusion",
) -> Path:
    """
    Write a diffusion series as CSV or as a bubble chart SVG.

    In the chart x is the day, y the row rank and the bubble radius grows
    with the square root of the count. Zero cells draw nothing.

    Args:
        series: Ordered series.
        path: Destination file.
        fmt: "csv" or "svg".
        title: SVG title.

    Returns:
        Written path.

    Raises:
        ValueError: For an unknown format or an empty series in SVG mode.
    """
    if fmt not in EMIT_FORMATS:
        raise ValueError(f"fmt must be one of {EMIT_FORMATS}")

    path = ensure_parent(path)
    if fmt == "csv":
        to_frame(series).to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    else:
        if not series.rows or not series.days:
            raise ValueError("Cannot draw an empty diffusion series")
        _emit_svg(series, path, title)

    print(f"[✅] Wrote {fmt} diffusion ({len(series.rows):,} emojis × {len(series.days):,} days) to {path}")
    return path


def load_diffusion_csv(path: str | Path) -> DiffusionSeries:
    """Read a CSV written by :func:`emit_diffusion`."""
    frame = pd.read_csv(path, dtype={"emoji": str}, keep_default_na=False, encoding="utf-8")
    day_columns = list(frame.columns[2:])
    days: List[date] = [pd.to_datetime(col, format=DATE_FMT).date() for col in day_columns]

    rows = [
        DiffusionRow(
            key=str(record["emoji"]),
            score=float(record["sentiment"]),
            counts=tuple(int(record[col]) for col in day_columns),
        )
        for record in frame.to_dict(orient="records")
    ]
    return DiffusionSeries(days=days, rows=rows)


if __name__ == "__main__":
    from utils.date_utils import parse_timestamp

    sample = [
        TweetRecord(id="1", text="🙏 stay safe", created_at=parse_timestamp("2017-09-06T10:00:00Z")),
        TweetRecord(id="2", text="🙏🙏❤️", created_at=parse_timestamp("2017-09-06T18:00:00Z")),
        TweetRecord(id="3", text="💔", created_at=parse_timestamp("2017-09-08T09:00:00Z")),
    ]

    print("=== diffusion demo ===")
    demo = bin_by_day(sample)
    print([to_day_str(d) for d in demo.days])
    for row in filter_threshold(demo, 2).rows:
        print(row)
