"""
Timestamp helpers for tweet corpora.

All instants are normalized to timezone-aware UTC ``datetime`` objects at
second resolution. Calendar days are ISO strings: YYYY-MM-DD.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone
from typing import Any, List

import pandas as pd


DATE_FMT = "%Y-%m-%d"
TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"


def parse_timestamp(value: Any) -> datetime:
    """
    Parse a tweet timestamp into a UTC datetime truncated to seconds.

    Accepts ISO 8601 strings, the classic Twitter format
    ("Wed Sep 06 14:02:11 +0000 2017"), epoch seconds, and datetimes.
    Naive values are taken to be UTC.

    Args:
        value: Raw timestamp value.

    Returns:
        Timezone-aware UTC datetime.

    Raises:
        ValueError: If the value cannot be parsed.
    """
    if value is None or (isinstance(value, str) and not value.strip()):
        raise ValueError("Empty timestamp")

    if isinstance(value, bool):
        raise ValueError(f"Invalid timestamp: {value!r}")

    try:
        if isinstance(value, (int, float)):
            ts = pd.Timestamp(value, unit="s")
        else:
            ts = pd.Timestamp(value)
    except (TypeError, ValueError, OverflowError) as exc:
        raise ValueError(f"Invalid timestamp: {value!r}") from exc

    if ts is pd.NaT or pd.isna(ts):
        raise ValueError(f"Invalid timestamp: {value!r}")

    if ts.tzinfo is None:
        ts = ts.tz_localize("UTC")
    else:
        ts = ts.tz_convert("UTC")

    return ts.floor("s").to_pydatetime()


def format_timestamp(moment: datetime) -> str:
    """Render a UTC datetime as ``YYYY-MM-DDTHH:MM:SSZ``."""
    return moment.astimezone(timezone.utc).strftime(TIMESTAMP_FMT)


def day_of(moment: datetime, tz_offset_hours: float = 0.0) -> date:
    """
    Return the calendar day of an instant after shifting by a fixed offset.

    Args:
        moment: Timezone-aware datetime.
        tz_offset_hours: Offset from UTC in hours (0 keeps UTC days).

    Returns:
        Calendar date.
    """
    shifted = moment.astimezone(timezone.utc) + timedelta(hours=tz_offset_hours)
    return shifted.date()


def day_span(first: date, last: date) -> List[date]:
    """
    Every calendar day from ``first`` to ``last`` inclusive.

    Args:
        first: Start day.
        last: End day.

    Returns:
        Ordered list of days; empty if ``last`` precedes ``first``.
    """
    if last < first:
        return []
    return [d.date() for d in pd.date_range(first, last, freq="D")]


def to_day_str(day: date) -> str:
    """Convert a date to its ISO string."""
    return day.strftime(DATE_FMT)


if __name__ == "__main__":
    print("=== date_utils demo ===")

    moment = parse_timestamp("Wed Sep 06 23:30:00 +0000 2017")
    print(format_timestamp(moment), day_of(moment), day_of(moment, -5))
    print([to_day_str(d) for d in day_span(date(2017, 9, 6), date(2017, 9, 12))])

    print("[✅] date_utils executed successfully.")
