"""
Domain records for the emoji solidarity analytics pipeline.

Records produced by ingest are immutable (frozen dataclasses with tuple
fields) so they can be shared read-only across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from models import BaseModel, FactoryMixin
from utils.date_utils import format_timestamp, parse_timestamp, to_day_str


# ---------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class TweetRecord(BaseModel, FactoryMixin):
    """One ingested post."""

    id: str
    text: str
    created_at: datetime
    user_location: Optional[str] = None
    hashtags: Tuple[str, ...] = ()
    is_retweet: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly dictionary (timestamp rendered as ISO UTC)."""
        return {
            "id": self.id,
            "text": self.text,
            "created_at": format_timestamp(self.created_at),
            "user_location": self.user_location,
            "hashtags": list(self.hashtags),
            "retweeted": self.is_retweet,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TweetRecord":
        """Rebuild a record from :meth:`to_dict` output."""
        return cls(
            id=str(data["id"]),
            text=data["text"],
            created_at=parse_timestamp(data["created_at"]),
            user_location=data.get("user_location"),
            hashtags=tuple(data.get("hashtags") or ()),
            is_retweet=bool(data.get("retweeted", False)),
        )


@dataclass
class CorpusStore(BaseModel):
    """Canonical in-memory tweet store for one event."""

    records: List[TweetRecord]
    event_tag: str
    source_path: str = ""
    ingested_at: str = ""
    skipped_lines: int = 0

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class TokenList(BaseModel):
    """Preprocessed tokens of one record."""

    tokens: Tuple[str, ...]
    source_id: str


# ---------------------------------------------------------------------
# Labeling
# ---------------------------------------------------------------------


class Label(str, Enum):
    """Hashtag / tweet class labels."""

    SOLIDARITY = "solidarity"
    NOT_SOLIDARITY = "not_solidarity"
    UNRELATED = "unrelated"

    @property
    def opposite(self) -> "Label":
        if self is Label.SOLIDARITY:
            return Label.NOT_SOLIDARITY
        if self is Label.NOT_SOLIDARITY:
            return Label.SOLIDARITY
        raise ValueError("Unrelated has no opposite class")


CLASS_LABELS: Tuple[Label, Label] = (Label.SOLIDARITY, Label.NOT_SOLIDARITY)


@dataclass(frozen=True)
class HashtagAnnotation(BaseModel, FactoryMixin):
    """One annotator's label for one hashtag."""

    hashtag: str
    label: Label
    annotator: str

    def __post_init__(self) -> None:
        if not self.hashtag or self.hashtag.startswith("#"):
            raise ValueError(f"Invalid hashtag in annotation: {self.hashtag!r}")


@dataclass
class AgreementReport(BaseModel):
    """Two-rater Cohen's kappa with its ingredients."""

    p_o: float
    p_e: float
    kappa: Optional[float]
    confusion: List[List[int]]
    n_items: int
    categories: List[str] = field(
        default_factory=lambda: [label.value for label in Label]
    )

    @property
    def kappa_defined(self) -> bool:
        return self.kappa is not None


@dataclass
class HashtagLexicon(BaseModel):
    """Consensus hashtag → class map (Solidarity / NotSolidarity only)."""

    entries: Dict[str, Label]
    disagreements: List[str] = field(default_factory=list)
    agreed_unrelated: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def label_of(self, hashtag: str) -> Optional[Label]:
        return self.entries.get(hashtag.lstrip("#").lower())


@dataclass
class LabeledCorpus(BaseModel):
    """Corpus partitioned by distant labels."""

    solidarity: List[TweetRecord]
    not_solidarity: List[TweetRecord]
    dropped_conflicts: int = 0
    dropped_unmatched: int = 0
    event_tag: str = ""

    def group(self, label: Label) -> List[TweetRecord]:
        if label is Label.SOLIDARITY:
            return self.solidarity
        if label is Label.NOT_SOLIDARITY:
            return self.not_solidarity
        raise ValueError("Only Solidarity and NotSolidarity are corpus groups")

    def groups(self) -> Dict[Label, List[TweetRecord]]:
        return {label: self.group(label) for label in CLASS_LABELS}

    @property
    def total(self) -> int:
        return (
            len(self.solidarity)
            + len(self.not_solidarity)
            + self.dropped_conflicts
            + self.dropped_unmatched
        )


# ---------------------------------------------------------------------
# Emoji
# ---------------------------------------------------------------------


class EmojiKind(str, Enum):
    SINGLE = "single"
    MODIFIER_SEQUENCE = "modifier_sequence"
    ZWJ_SEQUENCE = "zwj_sequence"
    FLAG = "flag"
    KEYCAP = "keycap"


@dataclass(frozen=True)
class EmojiSequence(BaseModel):
    """One user-perceived emoji as it appeared in text."""

    codepoints: Tuple[int, ...]
    key: str
    kind: EmojiKind

    @property
    def text(self) -> str:
        return "".join(chr(cp) for cp in self.codepoints)

    @property
    def codepoints_hex(self) -> str:
        return key_to_hex(self.key)


def key_to_hex(key: str) -> str:
    """Hyphen-joined upper-case hex scalars of a key (e.g. ``1F1EB-1F1F7``)."""
    return "-".join(f"{ord(ch):04X}" for ch in key)


@dataclass(frozen=True)
class RankedRow:
    rank: int
    key: str
    count: int


@dataclass
class RankedEmojiTable(BaseModel):
    """Top-k emoji keys of one class within one event."""

    rows: List[RankedRow]
    group: Label
    event_tag: str = ""

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class EmojiSentimentEntry(BaseModel):
    """Sentiment counts and score of one emoji key."""

    key: str
    n_neg: Optional[int]
    n_neut: Optional[int]
    n_pos: Optional[int]
    n_total: Optional[int]
    score: float


# ---------------------------------------------------------------------
# Classification reports
# ---------------------------------------------------------------------


@dataclass
class CvReport(BaseModel):
    """Stratified cross-validation outcome."""

    fold_accuracies: List[float]
    mean_accuracy: float
    config: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SplitReport(BaseModel):
    """Single seeded train / validation / test split outcome."""

    train_accuracy: float
    validation_accuracy: float
    test_accuracy: float
    sizes: Dict[str, int] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    loss_curve: List[float] = field(default_factory=list)


# ---------------------------------------------------------------------
# Geography
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class AffectedRegionSet(BaseModel):
    event_tag: str
    countries: frozenset

    def __contains__(self, code: object) -> bool:
        return code in self.countries


@dataclass
class PartitionReport(BaseModel):
    """Emoji occurrences in geotagged solidarity tweets, affected vs. other."""

    affected_emoji_count: int
    other_emoji_count: int
    affected_pct: float
    other_pct: float
    unresolved_tweets: int
    resolved_tweets: int = 0
    event_tag: str = ""


# ---------------------------------------------------------------------
# Network
# ---------------------------------------------------------------------


EdgeKey = Tuple[str, str]


def edge_key(a: str, b: str) -> EdgeKey:
    """Canonical unordered pair (codepoint order)."""
    return (a, b) if a <= b else (b, a)


@dataclass
class CooccurrenceGraph(BaseModel):
    """Weighted undirected emoji graph."""

    nodes: Dict[str, int] = field(default_factory=dict)
    edges: Dict[EdgeKey, int] = field(default_factory=dict)

    def weight(self, a: str, b: str) -> int:
        return self.edges.get(edge_key(a, b), 0)

    def neighbors(self) -> Dict[str, List[str]]:
        adjacency: Dict[str, List[str]] = {node: [] for node in self.nodes}
        for a, b in self.edges:
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
        return adjacency


@dataclass(frozen=True)
class LayoutConfig(BaseModel, FactoryMixin):
    """Fruchterman–Reingold parameters."""

    iterations: int = 500
    width: float = 1000.0
    height: float = 1000.0
    k: Optional[float] = None
    initial_temperature: Optional[float] = None
    cooling: str = "linear"
    decay: float = 0.95
    seed: int = 42

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.k is not None and self.k <= 0:
            raise ValueError("k must be positive")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame width and height must be positive")
        if self.cooling not in {"linear", "exponential"}:
            raise ValueError("cooling must be 'linear' or 'exponential'")


# ---------------------------------------------------------------------
# Diffusion
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class DiffusionRow:
    key: str
    score: float
    counts: Tuple[int, ...]

    @property
    def peak(self) -> int:
        return max(self.counts) if self.counts else 0


@dataclass
class DiffusionSeries(BaseModel):
    """Emoji × day occurrence matrix."""

    days: List[date]
    rows: List[DiffusionRow]
    threshold: int = 0
    subset: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def day_labels(self) -> List[str]:
        return [to_day_str(d) for d in self.days]

    def total(self) -> int:
        return sum(sum(row.counts) for row in self.rows)


# ---------------------------------------------------------------------
# Provenance
# ---------------------------------------------------------------------


@dataclass
class RunManifest(BaseModel):
    """Provenance of one CLI invocation."""

    command_line: List[str]
    config: Dict[str, Any]
    input_digests: Dict[str, str]
    seed: int
    tool_version: str
    unicode_data_version: str
    timings: Dict[str, float] = field(default_factory=dict)
    stages: List[str] = field(default_factory=list)
