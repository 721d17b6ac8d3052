"""
Offline location resolution and affected-region emoji partitioning.

Freeform profile locations are mapped to ISO 3166 alpha-2 country codes
with a shipped gazetteer (countries, US states, major cities). Solidarity
emoji counts are then split between the event's affected countries and
everywhere else.
"""

from __future__ import annotations

import re
import unicodedata
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from tqdm import tqdm

from analysis.emojis import emoji_keys
from models.entities import AffectedRegionSet, PartitionReport, TweetRecord
from utils.config import DATA_DIR


DEFAULT_GAZETTEER_PATH = DATA_DIR / "gazetteer.tsv"

# Single-word fallback ignores very short tokens ("in", "me", "la").
MIN_TOKEN_LENGTH = 3

AFFECTED_REGIONS: Dict[str, Tuple[str, ...]] = {
    "irma": ("US", "AG", "MF", "BL", "AI", "KN", "VG", "VI", "DO", "PR", "HT", "TC", "CU"),
    "paris": ("FR",),
}

_NON_WORD_RE = re.compile(r"[^\w,]+")
_COMMA_RE = re.compile(r"\s*,\s*")


def normalize_place(raw: str) -> str:
    """
    Fold a place string for lookup.

    Diacritics removed, lowercased, punctuation other than commas turned
    into spaces, whitespace collapsed.

    Args:
        raw: Freeform location.

    Returns:
        Normalized string (idempotent).
    """
    decomposed = unicodedata.normalize("NFKD", raw or "")
    folded = "".join(ch for ch in decomposed if not unicodedata.combining(ch)).lower()
    spaced = _NON_WORD_RE.sub(" ", folded).replace("_", " ")
    collapsed = " ".join(spaced.split())
    return _COMMA_RE.sub(", ", collapsed).strip(", ")


class Gazetteer:
    """Immutable place-name → country-code table."""

    def __init__(self, entries: Dict[str, str], source: str = "") -> None:
        self._entries = dict(entries)
        self.source = source

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def get(self, name: str) -> Optional[str]:
        return self._entries.get(name)

    @property
    def entries(self) -> Dict[str, str]:
        return dict(self._entries)


def load_gazetteer(path: Optional[str | Path] = None) -> Gazetteer:
    """
    Load a ``name<TAB>country_code`` gazetteer.

    Names are normalized with :func:`normalize_place`; the first entry wins
    for names listed twice (e.g. "virgin islands").

    Args:
        path: TSV file; defaults to the shipped gazetteer.

    Returns:
        Gazetteer.
    """
    path = Path(path) if path else DEFAULT_GAZETTEER_PATH
    if not path.exists():
        raise FileNotFoundError(f"Gazetteer not found: {path}")

    frame = pd.read_csv(
        path,
        sep="\t",
        header=None,
        names=["name", "country_code"],
        dtype=str,
        keep_default_na=False,
        comment="#",
        encoding="utf-8",
    )

    entries: Dict[str, str] = {}
    for row in frame.itertuples(index=False):
        name = normalize_place(row.name.replace(",", " "))
        code = row.country_code.strip().upper()
        if not name or len(code) != 2:
            continue
        entries.setdefault(name, code)

    print(f"[✅] Loaded {len(entries):,} gazetteer entries from {path.name}.")
    return Gazetteer(entries, source=str(path))


def _ngrams_right_to_left(words: Sequence[str], size: int) -> Iterable[str]:
    for start in range(len(words) - size, -1, -1):
        yield " ".join(words[start : start + size])


def resolve_location(raw: Optional[str], gazetteer: Gazetteer) -> Optional[str]:
    """
    Resolve a freeform location to a country code.

    Tries the whole normalized string, then comma segments from the right,
    then shorter word n-grams inside each segment (right to left, longest
    first; single words need at least three characters).

    Args:
        raw: Location string (may be None or empty).
        gazetteer: Loaded gazetteer.

    Returns:
        ISO alpha-2 code or None.
    """
    if not raw:
        return None

    normalized = normalize_place(raw)
    if not normalized:
        return None

    whole = normalized.replace(",", " ")
    whole = " ".join(whole.split())
    code = gazetteer.get(whole)
    if code:
        return code

    segments = [seg.strip() for seg in normalized.split(",") if seg.strip()]
    for segment in reversed(segments):
        code = gazetteer.get(segment)
        if code:
            return code

    for segment in reversed(segments):
        words = segment.split()
        for size in range(len(words) - 1, 0, -1):
            for gram in _ngrams_right_to_left(words, size):
                if size == 1 and len(gram) < MIN_TOKEN_LENGTH:
                    continue
                code = gazetteer.get(gram)
                if code:
                    return code

    return None


def affected_regions(event_tag: str, override: Optional[Iterable[str]] = None) -> AffectedRegionSet:
    """
    Affected-country set for an event.

    Args:
        event_tag: Event identifier ("irma", "paris").
        override: Explicit country codes, replacing the shipped set.

    Returns:
        AffectedRegionSet.

    Raises:
        ValueError: If the event is unknown and no override is given, or the
                    set would be empty.
    """
    if override is not None:
        countries = frozenset(code.strip().upper() for code in override if code.strip())
    elif event_tag in AFFECTED_REGIONS:
        countries = frozenset(AFFECTED_REGIONS[event_tag])
    else:
        raise ValueError(
            f"No affected regions known for event '{event_tag}'; pass them explicitly"
        )

    if not countries:
        raise ValueError("Affected region set cannot be empty")

    return AffectedRegionSet(event_tag=event_tag, countries=countries)


def split_by_region(
    records: Sequence[TweetRecord],
    gazetteer: Gazetteer,
    affected: AffectedRegionSet,
) -> Tuple[List[TweetRecord], List[TweetRecord], List[TweetRecord]]:
    """
    Split records into affected, other and unresolved groups.

    Args:
        records: Tweets.
        gazetteer: Loaded gazetteer.
        affected: Affected countries.

    Returns:
        ``(affected, other, unresolved)`` lists in input order.
    """
    inside: List[TweetRecord] = []
    outside: List[TweetRecord] = []
    unresolved: List[TweetRecord] = []

    for record in records:
        code = resolve_location(record.user_location, gazetteer)
        if code is None:
            unresolved.append(record)
        elif code in affected:
            inside.append(record)
        else:
            outside.append(record)

    return inside, outside, unresolved


def partition_emojis(
    solidarity: Sequence[TweetRecord],
    gazetteer: Gazetteer,
    affected: AffectedRegionSet,
    distinct_per_tweet: bool = False,
    quiet: bool = True,
) -> PartitionReport:
    """
    Emoji occurrences in geotagged solidarity tweets, affected vs. other.

    Tweets whose location does not resolve are counted separately and left
    out of the percentages.

    Args:
        solidarity: Solidarity-class tweets.
        gazetteer: Loaded gazetteer.
        affected: Affected countries for the event.
        distinct_per_tweet: Count each emoji once per tweet.
        quiet: Disable the progress bar.

    Returns:
        PartitionReport.
    """
    affected_count = 0
    other_count = 0
    resolved = 0
    unresolved = 0

    for record in tqdm(solidarity, desc="Partitioning by region", disable=quiet):
        code = resolve_location(record.user_location, gazetteer)
        if code is None:
            unresolved += 1
            continue

        resolved += 1
        n_emojis = len(emoji_keys(record.text, distinct=distinct_per_tweet))
        if code in affected:
            affected_count += n_emojis
        else:
            other_count += n_emojis

    total = affected_count + other_count
    affected_pct = 100.0 * affected_count / total if total else 0.0
    other_pct = 100.0 - affected_pct if total else 0.0

    print(
        f"[✅] Affected regions: {affected_count:,} ({affected_pct:.2f}%), "
        f"other regions: {other_count:,} ({other_pct:.2f}%), "
        f"unresolved tweets: {unresolved:,}."
    )
    return PartitionReport(
        affected_emoji_count=affected_count,
        other_emoji_count=other_count,
        affected_pct=affected_pct,
        other_pct=other_pct,
        unresolved_tweets=unresolved,
        resolved_tweets=resolved,
        event_tag=affected.event_tag,
    )


if __name__ == "__main__":
    gaz = load_gazetteer()
    print("=== geo demo ===")
    for place in ["Paris, France", "miami fl", "Pointe-à-Pitre", "", "Somewhere"]:
        print(repr(place), "→", resolve_location(place, gaz))
