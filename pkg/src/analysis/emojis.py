"""
Emoji extraction, counting, ranking and sentiment lookup.

Segmentation is left-to-right and longest-match over Unicode emoji
sequences: ZWJ sequences, then modifier sequences, flag pairs, keycaps and
single emoji scalars. The set of scalars treated as emoji is generated from
the ``emoji`` package's data table, so results are pinned to that package's
Unicode version (see ``UNICODE_DATA_VERSION``).
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import emoji
import pandas as pd
from tqdm import tqdm

from models.entities import (
    CLASS_LABELS,
    EmojiKind,
    EmojiSentimentEntry,
    EmojiSequence,
    Label,
    LabeledCorpus,
    RankedEmojiTable,
    RankedRow,
    TweetRecord,
    key_to_hex,
)
from utils.io_utils import ensure_parent
from utils.parallel import parallel_count


VS15 = 0xFE0E
VS16 = 0xFE0F
ZWJ = 0x200D
COMBINING_KEYCAP = 0x20E3
RI_FIRST, RI_LAST = 0x1F1E6, 0x1F1FF
MODIFIER_FIRST, MODIFIER_LAST = 0x1F3FB, 0x1F3FF
TAG_FIRST, TAG_LAST = 0xE0020, 0xE007E
CANCEL_TAG = 0xE007F
KEYCAP_BASES: FrozenSet[int] = frozenset(map(ord, "#*0123456789"))

_STRUCTURAL = {VS15, VS16, ZWJ, COMBINING_KEYCAP, CANCEL_TAG}


def _is_regional_indicator(cp: int) -> bool:
    return RI_FIRST <= cp <= RI_LAST


def _is_modifier(cp: int) -> bool:
    return MODIFIER_FIRST <= cp <= MODIFIER_LAST


def _is_tag(cp: int) -> bool:
    return TAG_FIRST <= cp <= TAG_LAST


def _build_scalar_table() -> FrozenSet[int]:
    """Every scalar that occurs as an emoji element in the package data."""
    scalars = set()
    for sequence in emoji.EMOJI_DATA:
        for ch in sequence:
            cp = ord(ch)
            if cp in _STRUCTURAL or _is_tag(cp) or cp in KEYCAP_BASES:
                continue
            scalars.add(cp)
    scalars.update(range(MODIFIER_FIRST, MODIFIER_LAST + 1))
    return frozenset(scalars)


def _data_version() -> str:
    versions = [
        entry.get("E", 0)
        for entry in emoji.EMOJI_DATA.values()
        if isinstance(entry.get("E", 0), (int, float))
    ]
    return f"emoji-{emoji.__version__} (Emoji {max(versions, default=0)})"


EMOJI_SCALARS: FrozenSet[int] = _build_scalar_table()
UNICODE_DATA_VERSION: str = _data_version()


# ---------------------------------------------------------------------
# Segmentation
# ---------------------------------------------------------------------


def canonical_key(codepoints: Iterable[int]) -> str:
    """Counting key: the sequence with variation selectors removed."""
    return "".join(chr(cp) for cp in codepoints if cp not in (VS15, VS16))


def _match_element(
    cps: Sequence[int],
    i: int,
    joined: bool = False,
) -> Tuple[int, Optional[EmojiKind]]:
    """
    Match one emoji element starting at ``i``.

    ``joined`` is set for elements following a ZWJ, where flags and keycaps
    cannot appear.

    Returns:
        ``(end, kind)``; ``end == i`` and ``kind is None`` when nothing matches.
    """
    n = len(cps)
    cp = cps[i]

    if _is_regional_indicator(cp):
        if joined:
            return i, None
        if i + 1 < n and _is_regional_indicator(cps[i + 1]):
            return i + 2, EmojiKind.FLAG
        return i + 1, EmojiKind.SINGLE

    if cp in KEYCAP_BASES:
        if joined:
            return i, None
        j = i + 1
        if j < n and cps[j] in (VS15, VS16):
            j += 1
        if j < n and cps[j] == COMBINING_KEYCAP:
            return j + 1, EmojiKind.KEYCAP
        return i, None

    if cp not in EMOJI_SCALARS:
        return i, None

    j = i + 1
    kind = EmojiKind.SINGLE
    if j < n and _is_modifier(cps[j]) and not _is_modifier(cp):
        j += 1
        kind = EmojiKind.MODIFIER_SEQUENCE
    if j < n and cps[j] in (VS15, VS16):
        j += 1

    # Subdivision flags: base + tag characters + cancel tag.
    if j < n and _is_tag(cps[j]):
        k = j
        while k < n and _is_tag(cps[k]):
            k += 1
        if k < n and cps[k] == CANCEL_TAG:
            j = k + 1

    return j, kind


def iter_emoji_spans(text: str) -> Iterator[Tuple[int, int, EmojiSequence]]:
    """
    Yield ``(start, end, sequence)`` for every emoji sequence in ``text``.

    Offsets index into ``text`` (one index per Unicode scalar).

    Args:
        text: Any Unicode string.

    Yields:
        Spans in text order; spans never overlap.
    """
    cps = [ord(ch) for ch in text]
    n = len(cps)
    i = 0

    while i < n:
        end, kind = _match_element(cps, i)
        if kind is None:
            i += 1
            continue

        has_zwj = False
        while end + 1 < n and cps[end] == ZWJ:
            nxt, joined_kind = _match_element(cps, end + 1, joined=True)
            if joined_kind is None:
                break
            end = nxt
            has_zwj = True

        if has_zwj:
            kind = EmojiKind.ZWJ_SEQUENCE

        codepoints = tuple(cps[i:end])
        yield i, end, EmojiSequence(
            codepoints=codepoints,
            key=canonical_key(codepoints),
            kind=kind,
        )
        i = end


def extract_emoji(text: str) -> List[EmojiSequence]:
    """
    Extract emoji sequences from text, in order.

    Unpaired regional indicators come out as ``Single``; non-emoji text is
    ignored. Never raises on valid ``str`` input.

    Args:
        text: Unicode string.

    Returns:
        List of EmojiSequence.
    """
    return [seq for _, _, seq in iter_emoji_spans(text)]


def emoji_keys(text: str, distinct: bool = False) -> List[str]:
    """
    Keys of the emoji in ``text``.

    Args:
        text: Unicode string.
        distinct: Keep only the first occurrence of each key.

    Returns:
        Keys in text order.
    """
    keys = [seq.key for seq in extract_emoji(text)]
    if distinct:
        return list(dict.fromkeys(keys))
    return keys


def is_emoji_token(token: str) -> bool:
    """True if the whole token is exactly one emoji sequence."""
    spans = list(iter_emoji_spans(token))
    return len(spans) == 1 and spans[0][0] == 0 and spans[0][1] == len(token)


# ---------------------------------------------------------------------
# Counting and ranking
# ---------------------------------------------------------------------


def emoji_counter(
    records: Sequence[TweetRecord],
    distinct_per_tweet: bool = False,
    threads: int = 1,
    quiet: bool = True,
) -> Counter:
    """
    Occurrence counts per emoji key over a list of tweets.

    Args:
        records: Tweets to scan.
        distinct_per_tweet: Count each key at most once per tweet.
        threads: Worker count for chunked counting.
        quiet: Disable the progress bar.

    Returns:
        Counter of key → occurrences.
    """

    def count_chunk(chunk: Sequence[TweetRecord]) -> Counter:
        counts: Counter = Counter()
        for record in tqdm(chunk, desc="Counting emojis", leave=False, disable=quiet):
            counts.update(emoji_keys(record.text, distinct=distinct_per_tweet))
        return counts

    return parallel_count(records, count_chunk, threads=threads)


def count_emojis(
    corpus: LabeledCorpus,
    distinct_per_tweet: bool = False,
    threads: int = 1,
) -> Dict[Label, int]:
    """
    Total emoji-sequence occurrences per class.

    Args:
        corpus: Labeled corpus.
        distinct_per_tweet: Count repeated emoji within one tweet once.
        threads: Worker count.

    Returns:
        Mapping Solidarity / NotSolidarity → total occurrences.
    """
    totals = {
        label: sum(
            emoji_counter(records, distinct_per_tweet, threads=threads).values()
        )
        for label, records in corpus.groups().items()
    }
    print(
        f"[✅] Counted {totals[Label.SOLIDARITY]:,} solidarity and "
        f"{totals[Label.NOT_SOLIDARITY]:,} not-solidarity emojis."
    )
    return totals


def total_counts_table(
    corpus: LabeledCorpus,
    distinct_per_tweet: bool = False,
    threads: int = 1,
) -> Dict[str, int]:
    """Emoji totals per class plus the overall total, keyed by label value."""
    totals = count_emojis(corpus, distinct_per_tweet, threads=threads)
    table = {label.value: totals[label] for label in CLASS_LABELS}
    table["total"] = sum(totals.values())
    return table


def rank_counter(
    counts: Counter,
    k: int,
    group: Label,
    event_tag: str = "",
) -> RankedEmojiTable:
    """
    Rank keys by count descending, ties by key codepoint order.

    Args:
        counts: Key → count.
        k: Table length limit (≥ 1).
        group: Class the counts belong to.
        event_tag: Event identifier.

    Returns:
        RankedEmojiTable with at most ``k`` rows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    ordered = sorted(
        ((key, n) for key, n in counts.items() if n > 0),
        key=lambda item: (-item[1], item[0]),
    )
    rows = [
        RankedRow(rank=rank, key=key, count=n)
        for rank, (key, n) in enumerate(ordered[:k], start=1)
    ]
    return RankedEmojiTable(rows=rows, group=group, event_tag=event_tag)


def rank_top_k(
    corpus: LabeledCorpus,
    k: int = 10,
    distinct_per_tweet: bool = False,
    threads: int = 1,
) -> Dict[Label, RankedEmojiTable]:
    """
    Top-k emoji per class.

    Args:
        corpus: Labeled corpus.
        k: Number of rows per table.
        distinct_per_tweet: Count repeated emoji within one tweet once.
        threads: Worker count.

    Returns:
        Mapping class → RankedEmojiTable.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    return {
        label: rank_counter(
            emoji_counter(records, distinct_per_tweet, threads=threads),
            k,
            label,
            corpus.event_tag,
        )
        for label, records in corpus.groups().items()
    }


def export_ranked_csv(table: RankedEmojiTable, path: str | Path) -> Path:
    """
    Write a ranked table as ``rank,emoji,codepoints_hex,count``.

    Args:
        table: Ranked table.
        path: Destination CSV.

    Returns:
        Written path.
    """
    path = ensure_parent(path)
    frame = pd.DataFrame(
        [
            {
                "rank": row.rank,
                "emoji": row.key,
                "codepoints_hex": key_to_hex(row.key),
                "count": row.count,
            }
            for row in table.rows
        ],
        columns=["rank", "emoji", "codepoints_hex", "count"],
    )
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path


# ---------------------------------------------------------------------
# Sentiment
# ---------------------------------------------------------------------


_COLUMN_ALIASES = {
    "emoji": "emoji",
    "n_neg": "n_neg",
    "negative": "n_neg",
    "n_neut": "n_neut",
    "neutral": "n_neut",
    "n_pos": "n_pos",
    "positive": "n_pos",
    "score": "score",
    "sentiment": "score",
    "sentiment_score": "score",
}


def _row_entry(row: pd.Series, has_score: bool, has_counts: bool) -> EmojiSentimentEntry:
    raw = row.get("emoji")
    if not isinstance(raw, str) or not raw.strip():
        raise ValueError("missing emoji")
    key = canonical_key(ord(ch) for ch in raw.strip())

    counts: Dict[str, Optional[int]] = {"n_neg": None, "n_neut": None, "n_pos": None}
    if has_counts:
        for name in counts:
            value = float(row[name])
            if value < 0 or value != int(value):
                raise ValueError(f"{name} must be a non-negative integer")
            counts[name] = int(value)

    total = sum(counts.values()) if has_counts else None

    if has_score and not pd.isna(row["score"]):
        score = float(row["score"])
    elif has_counts:
        if not total:
            raise ValueError("zero occurrences")
        score = (counts["n_pos"] - counts["n_neg"]) / total
    else:
        raise ValueError("no score or counts")

    if not -1.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [-1, 1]")

    return EmojiSentimentEntry(
        key=key,
        n_neg=counts["n_neg"],
        n_neut=counts["n_neut"],
        n_pos=counts["n_pos"],
        n_total=total,
        score=score,
    )


def load_sentiment(path: str | Path) -> Dict[str, EmojiSentimentEntry]:
    """
    Load an emoji sentiment ranking CSV.

    Accepts ``emoji,n_neg,n_neut,n_pos``, ``emoji,score``, or the published
    ranking's own header (``Emoji,...,Negative,Neutral,Positive,...``).
    An explicit score wins; otherwise score = (n_pos − n_neg) / n_total.

    Args:
        path: CSV file.

    Returns:
        Mapping key → EmojiSentimentEntry.

    Raises:
        FileNotFoundError: If the file is missing.
        ValueError: If the file is empty or lacks usable columns.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Sentiment file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as exc:
        raise ValueError(f"Sentiment file is empty: {path}") from exc

    frame = frame.rename(
        columns={
            col: _COLUMN_ALIASES[col.strip().lower()]
            for col in frame.columns
            if col.strip().lower() in _COLUMN_ALIASES
        }
    )
    if frame.empty:
        raise ValueError(f"Sentiment file is empty: {path}")

    has_score = "score" in frame.columns
    has_counts = {"n_neg", "n_neut", "n_pos"}.issubset(frame.columns)
    if "emoji" not in frame.columns or not (has_score or has_counts):
        raise ValueError(
            "Sentiment CSV needs columns (emoji, n_neg, n_neut, n_pos) or (emoji, score)"
        )

    if has_score:
        frame["score"] = pd.to_numeric(frame["score"], errors="coerce")

    table: Dict[str, EmojiSentimentEntry] = {}
    skipped = 0
    for _, row in frame.iterrows():
        try:
            entry = _row_entry(row, has_score, has_counts)
        except (ValueError, TypeError, KeyError):
            skipped += 1
            continue
        table.setdefault(entry.key, entry)

    if skipped:
        print(f"[⚠️ Warning] Skipped {skipped:,} malformed sentiment rows in {path.name}")
    print(f"[✅] Loaded sentiment scores for {len(table):,} emojis.")
    return table


def sentiment_of(
    key: str,
    table: Dict[str, EmojiSentimentEntry],
    misses: Optional[Counter] = None,
) -> float:
    """
    Sentiment score of an emoji key; unknown keys score 0.0 (neutral).

    Args:
        key: Emoji key (variation selectors are ignored).
        table: Loaded sentiment table.
        misses: Optional counter incremented per unknown key.

    Returns:
        Score in [-1, 1].
    """
    entry = table.get(canonical_key(ord(ch) for ch in key))
    if entry is None:
        if misses is not None:
            misses[key] += 1
        return 0.0
    return max(-1.0, min(1.0, entry.score))


if __name__ == "__main__":
    print("=== emojis demo ===")
    print(UNICODE_DATA_VERSION)
    for seq in extract_emoji("Stay safe 🇫🇷 👍🏽x🙏 👨‍👩‍👦 #️⃣"):
        print(seq.kind.value, seq.codepoints_hex)
