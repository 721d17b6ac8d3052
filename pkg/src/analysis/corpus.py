"""
Tweet corpus ingestion, cleaning and preprocessing.

Reads JSONL tweet dumps into a CorpusStore, removes retweets and
duplicate texts, and turns records into lowercase token lists for the
classifiers.
"""

from __future__ import annotations

import re
import unicodedata
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from tqdm import tqdm

from analysis.emojis import iter_emoji_spans
from models.entities import CorpusStore, TokenList, TweetRecord
from utils.config import DATA_DIR
from utils.date_utils import format_timestamp, parse_timestamp
from utils.errors import EmptyCorpusError
from utils.io_utils import iter_jsonl, write_jsonl


DEFAULT_STOPWORDS_PATH = DATA_DIR / "stopwords_en.txt"

_HASHTAG_RE = re.compile(r"#(\w+)")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"[#@]?\w+(?:['’]\w+)*")


# ---------------------------------------------------------------------
# Field helpers
# ---------------------------------------------------------------------


def extract_hashtags(text: str) -> Tuple[str, ...]:
    """
    Lowercased hashtags of a text, ``#`` removed, first occurrence order.

    Args:
        text: Tweet text.

    Returns:
        Tuple of distinct hashtags.
    """
    tags = (match.group(1).lower() for match in _HASHTAG_RE.finditer(text))
    return tuple(dict.fromkeys(tags))


def is_retweet(obj: Dict, text: str) -> bool:
    """Use the ``retweeted`` flag when present, else the ``RT @`` prefix."""
    flag = obj.get("retweeted")
    if isinstance(flag, bool):
        return flag
    if isinstance(flag, str) and flag.strip().lower() in {"true", "false"}:
        return flag.strip().lower() == "true"
    return text.lstrip().startswith("RT @")


def normalize_text(text: str) -> str:
    """
    Duplicate-detection form of a text.

    NFC, lowercase, URLs removed, whitespace collapsed.

    Args:
        text: Raw text.

    Returns:
        Normalized text.
    """
    text = unicodedata.normalize("NFC", text).lower()
    text = _URL_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def _record_from_obj(obj: object, seen_ids: Set[str]) -> Optional[TweetRecord]:
    """Build a record from one parsed JSON line, or None if invalid."""
    if not isinstance(obj, dict):
        return None

    raw_id = obj.get("id")
    text = obj.get("text")
    if raw_id is None or not isinstance(text, str):
        return None

    record_id = str(raw_id).strip()
    if not record_id or record_id in seen_ids:
        return None

    try:
        created_at = parse_timestamp(obj.get("created_at"))
    except ValueError:
        return None

    location = obj.get("user_location")
    if location is not None and not isinstance(location, str):
        location = str(location)

    return TweetRecord(
        id=record_id,
        text=text,
        created_at=created_at,
        user_location=location,
        hashtags=extract_hashtags(text),
        is_retweet=is_retweet(obj, text),
    )


# ---------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------


def ingest_jsonl(path: str | Path, event_tag: str, quiet: bool = True) -> CorpusStore:
    """
    Read a JSONL tweet dump into a CorpusStore.

    Each line needs ``id``, ``text`` and ``created_at``; ``user_location``
    and ``retweeted`` are optional. Malformed lines are counted and skipped.

    Args:
        path: JSONL file.
        event_tag: Event identifier (e.g. "irma").
        quiet: Disable the progress bar.

    Returns:
        CorpusStore with one record per valid line.

    Raises:
        FileNotFoundError: If the file does not exist.
        EmptyCorpusError: If no line yields a valid record.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")

    records: List[TweetRecord] = []
    seen_ids: Set[str] = set()
    skipped = 0

    for _, obj, error in tqdm(iter_jsonl(path), desc=f"Ingesting {path.name}", disable=quiet):
        record = None if error else _record_from_obj(obj, seen_ids)
        if record is None:
            skipped += 1
            continue
        seen_ids.add(record.id)
        records.append(record)

    if skipped:
        print(f"[⚠️ Warning] Skipped {skipped:,} malformed lines in {path.name}")

    if not records:
        raise EmptyCorpusError(f"No valid records in {path}")

    print(f"[✅] Ingested {len(records):,} records for event '{event_tag}'.")
    return CorpusStore(
        records=records,
        event_tag=event_tag,
        source_path=str(path),
        ingested_at=format_timestamp(datetime.now(timezone.utc)),
        skipped_lines=skipped,
    )


def dedupe_and_filter(store: CorpusStore, exact: bool = False) -> CorpusStore:
    """
    Drop retweets and keep one record per (normalized) text.

    Among duplicates the earliest ``created_at`` wins, ties by ascending id.
    Surviving records keep their relative order.

    Args:
        store: Ingested store.
        exact: Compare raw texts instead of normalized texts.

    Returns:
        New CorpusStore.
    """
    originals = [record for record in store.records if not record.is_retweet]

    keepers: Dict[str, TweetRecord] = {}
    for record in originals:
        key = record.text if exact else normalize_text(record.text)
        current = keepers.get(key)
        if current is None or (record.created_at, record.id) < (current.created_at, current.id):
            keepers[key] = record

    kept_ids = {record.id for record in keepers.values()}
    records = [record for record in originals if record.id in kept_ids]

    removed = len(store.records) - len(records)
    print(f"[✅] Removed {removed:,} retweets/duplicates; {len(records):,} records remain.")

    return CorpusStore(
        records=records,
        event_tag=store.event_tag,
        source_path=store.source_path,
        ingested_at=store.ingested_at,
        skipped_lines=store.skipped_lines,
    )


def load_stopwords(path: Optional[str | Path] = None) -> FrozenSet[str]:
    """
    Load a stopword list (one word per line, UTF-8).

    Args:
        path: Word list; defaults to the shipped 179-word English list.

    Returns:
        Frozen set of lowercase words.
    """
    path = Path(path) if path else DEFAULT_STOPWORDS_PATH
    if not path.exists():
        raise FileNotFoundError(f"Stopword file not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        return frozenset(line.strip().lower() for line in f if line.strip())


def tokenize(text: str) -> List[str]:
    """
    Lowercase and split a text into tokens.

    Splits on whitespace and punctuation; emoji sequences and ``#`` / ``@``
    prefixed words survive as single tokens. Emoji tokens are their
    counting keys.

    Args:
        text: Raw text.

    Returns:
        Tokens in text order.
    """
    text = text.lower()
    tokens: List[str] = []
    cursor = 0

    for start, end, sequence in iter_emoji_spans(text):
        tokens.extend(_WORD_RE.findall(text[cursor:start]))
        tokens.append(sequence.key)
        cursor = end
    tokens.extend(_WORD_RE.findall(text[cursor:]))

    return tokens


def preprocess(
    record: TweetRecord,
    stop_list: Iterable[str],
    strip_hashtags: Iterable[str],
) -> TokenList:
    """
    Tokenize a record and drop stopwords and annotated hashtags.

    Args:
        record: Tweet record.
        stop_list: Lowercase stopwords.
        strip_hashtags: Lowercase hashtags (with or without ``#``) to remove.

    Returns:
        TokenList for the record.
    """
    stops = set(stop_list)
    stripped = {tag.lstrip("#") for tag in strip_hashtags}

    tokens = [
        token
        for token in tokenize(record.text)
        if token not in stops and token.lstrip("#") not in stripped
    ]
    return TokenList(tokens=tuple(tokens), source_id=record.id)


def export_jsonl(
    store: CorpusStore,
    path: str | Path,
    token_lists: Optional[Iterable[TokenList]] = None,
) -> Path:
    """
    Write the store as JSONL (ingest schema plus a ``tokens`` array).

    Args:
        store: Store to export.
        path: Destination file.
        token_lists: Tokens per record; computed with :func:`tokenize` if omitted.

    Returns:
        Written path.
    """
    tokens_by_id = {tl.source_id: list(tl.tokens) for tl in (token_lists or [])}

    def rows():
        for record in store.records:
            row = record.to_dict()
            row["tokens"] = tokens_by_id.get(record.id, tokenize(record.text))
            yield row

    count = write_jsonl(path, rows())
    print(f"[✅] Exported {count:,} records to {path}")
    return Path(path)


def load_jsonl(path: str | Path, event_tag: str) -> CorpusStore:
    """
    Re-read a file written by :func:`export_jsonl`.

    The ``tokens`` column is ignored; records come back in file order.
    """
    return ingest_jsonl(path, event_tag, quiet=True)


if __name__ == "__main__":
    sample = TweetRecord(
        id="1",
        text="We Stand With Paris #PrayForParis 🙏🏽",
        created_at=parse_timestamp("2015-11-13T22:00:00Z"),
        hashtags=extract_hashtags("We Stand With Paris #PrayForParis"),
    )

    print("=== corpus demo ===")
    print(sample.hashtags)
    print(preprocess(sample, {"we", "with"}, {"prayforparis"}).tokens)
