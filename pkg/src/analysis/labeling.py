"""
Hashtag annotation agreement, consensus lexicon and distant labeling.

Two annotators label frequent hashtags as Solidarity, NotSolidarity or
Unrelated. Agreement is measured with Cohen's kappa, agreed class labels
form a lexicon, and tweets inherit the class of their lexicon hashtags.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix
from tqdm import tqdm

from models.entities import (
    AgreementReport,
    CorpusStore,
    HashtagAnnotation,
    HashtagLexicon,
    Label,
    LabeledCorpus,
    TweetRecord,
)
from utils.errors import AgreementGateError, EmptyInputError, InputMismatchError
from utils.io_utils import ensure_parent, iter_jsonl, write_jsonl


CATEGORIES: Tuple[Label, ...] = (Label.SOLIDARITY, Label.NOT_SOLIDARITY, Label.UNRELATED)


def parse_label(raw: str) -> Label:
    """
    Parse an annotation label ("solidarity", "not_solidarity", "unrelated").

    Spaces and hyphens are treated as underscores; case is ignored.
    """
    value = str(raw).strip().lower().replace(" ", "_").replace("-", "_")
    try:
        return Label(value)
    except ValueError as exc:
        raise ValueError(f"Unknown label: {raw!r}") from exc


def load_annotations(path: str | Path) -> List[HashtagAnnotation]:
    """
    Load a TSV of ``hashtag<TAB>label<TAB>annotator`` rows.

    A header row is optional. Hashtags are lowercased and a leading ``#``
    is removed. Unparseable rows are skipped with a warning.

    Args:
        path: Annotation file.

    Returns:
        List of HashtagAnnotation.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Annotation file not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=["hashtag", "label", "annotator"],
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return []

    annotations: List[HashtagAnnotation] = []
    skipped = 0
    for idx, row in enumerate(frame.itertuples(index=False)):
        if idx == 0 and row.hashtag.strip().lower() == "hashtag":
            continue
        try:
            annotations.append(
                HashtagAnnotation(
                    hashtag=row.hashtag.strip().lstrip("#").lower(),
                    label=parse_label(row.label),
                    annotator=row.annotator.strip() or path.stem,
                )
            )
        except (ValueError, AttributeError):
            skipped += 1

    if skipped:
        print(f"[⚠️ Warning] Skipped {skipped:,} malformed annotation rows in {path.name}")
    print(f"[✅] Loaded {len(annotations):,} annotations from {path.name}.")
    return annotations


def _index(annotations: Sequence[HashtagAnnotation], side: str) -> Dict[str, Label]:
    index: Dict[str, Label] = {}
    for item in annotations:
        previous = index.get(item.hashtag)
        if previous is not None and previous is not item.label:
            raise InputMismatchError(
                f"Annotator {side} labels '{item.hashtag}' twice with different labels"
            )
        index[item.hashtag] = item.label
    return index


def _join(
    a: Sequence[HashtagAnnotation],
    b: Sequence[HashtagAnnotation],
) -> Tuple[List[str], List[Label], List[Label]]:
    """Join both annotation lists on hashtag (sorted order)."""
    left, right = _index(a, "a"), _index(b, "b")

    if set(left) != set(right):
        only_a = sorted(set(left) - set(right))
        only_b = sorted(set(right) - set(left))
        raise InputMismatchError(
            f"Annotation sets differ: {len(only_a)} hashtags only in a "
            f"(e.g. {only_a[:3]}), {len(only_b)} only in b (e.g. {only_b[:3]})"
        )

    hashtags = sorted(left)
    return hashtags, [left[h] for h in hashtags], [right[h] for h in hashtags]


def compute_kappa(
    a: Sequence[HashtagAnnotation],
    b: Sequence[HashtagAnnotation],
) -> AgreementReport:
    """
    Cohen's kappa between two annotators over three categories.

    p_o = trace(C) / n, p_e = Σ_c row_c · col_c / n². Kappa is None when
    p_e = 1 (both annotators used one and the same category).

    Args:
        a: First annotator's labels.
        b: Second annotator's labels.

    Returns:
        AgreementReport.

    Raises:
        EmptyInputError: If there is nothing to compare.
        InputMismatchError: If the hashtag sets differ.
    """
    if not a and not b:
        raise EmptyInputError("No annotations to compare")

    _, labels_a, labels_b = _join(a, b)
    n = len(labels_a)
    if n == 0:
        raise EmptyInputError("No annotations to compare")

    order = [label.value for label in CATEGORIES]
    confusion = confusion_matrix(
        [label.value for label in labels_a],
        [label.value for label in labels_b],
        labels=order,
    ).astype(np.int64)

    agreed = int(np.trace(confusion))
    chance = int(confusion.sum(axis=1) @ confusion.sum(axis=0))

    p_o = agreed / n
    p_e = chance / (n * n)
    kappa: Optional[float] = None if chance == n * n else (p_o - p_e) / (1.0 - p_e)

    return AgreementReport(
        p_o=p_o,
        p_e=p_e,
        kappa=kappa,
        confusion=confusion.tolist(),
        n_items=n,
        categories=order,
    )


def check_agreement(report: AgreementReport, min_kappa: Optional[float]) -> None:
    """
    Enforce the agreement gate, or just warn when no gate is configured.

    Args:
        report: Agreement report.
        min_kappa: Minimum acceptable kappa; None disables the gate.

    Raises:
        AgreementGateError: If the gate is set and kappa is undefined or lower.
    """
    kappa = report.kappa
    shown = "undefined" if kappa is None else f"{kappa:.4f}"

    if min_kappa is None:
        if kappa is None or kappa <= 0.65:
            print(f"[⚠️ Warning] Kappa {shown} is not above 0.65; continuing.")
        return

    if kappa is None or kappa < min_kappa:
        raise AgreementGateError(f"Kappa {shown} is below the required {min_kappa}")

    print(f"[✅] Kappa {shown} passes the {min_kappa} gate.")


def consensus_lexicon(
    a: Sequence[HashtagAnnotation],
    b: Sequence[HashtagAnnotation],
) -> HashtagLexicon:
    """
    Hashtags both annotators put in the same class.

    Agreed-Unrelated hashtags and disagreements are left out; both are
    listed on the returned lexicon for reporting.

    Args:
        a: First annotator's labels.
        b: Second annotator's labels.

    Returns:
        HashtagLexicon.
    """
    hashtags, labels_a, labels_b = _join(a, b)

    entries: Dict[str, Label] = {}
    disagreements: List[str] = []
    unrelated: List[str] = []

    for hashtag, left, right in zip(hashtags, labels_a, labels_b):
        if left is not right:
            disagreements.append(hashtag)
        elif left is Label.UNRELATED:
            unrelated.append(hashtag)
        else:
            entries[hashtag] = left

    if not entries:
        print("[⚠️ Warning] Consensus lexicon is empty.")
    if disagreements:
        print(f"[⚠️ Warning] {len(disagreements):,} hashtags had conflicting labels.")

    print(f"[✅] Consensus lexicon holds {len(entries):,} hashtags.")
    return HashtagLexicon(entries=entries, disagreements=disagreements, agreed_unrelated=unrelated)


def distant_label(
    store: CorpusStore,
    lexicon: HashtagLexicon,
    quiet: bool = True,
) -> LabeledCorpus:
    """
    Label tweets by the lexicon classes of their hashtags.

    A record joins class C iff it carries at least one hashtag labeled C and
    none labeled the other class. Mixed records count as conflicts, records
    without lexicon hashtags as unmatched.

    Args:
        store: Deduplicated corpus.
        lexicon: Consensus lexicon.
        quiet: Disable the progress bar.

    Returns:
        LabeledCorpus.
    """
    solidarity: List[TweetRecord] = []
    not_solidarity: List[TweetRecord] = []
    conflicts = 0
    unmatched = 0

    for record in tqdm(store.records, desc="Distant labeling", disable=quiet):
        found = {lexicon.label_of(tag) for tag in record.hashtags} - {None}
        if len(found) > 1:
            conflicts += 1
        elif not found:
            unmatched += 1
        elif Label.SOLIDARITY in found:
            solidarity.append(record)
        else:
            not_solidarity.append(record)

    print(
        f"[✅] Labeled {len(solidarity):,} solidarity / {len(not_solidarity):,} "
        f"not-solidarity tweets ({conflicts:,} conflicts, {unmatched:,} unmatched)."
    )
    return LabeledCorpus(
        solidarity=solidarity,
        not_solidarity=not_solidarity,
        dropped_conflicts=conflicts,
        dropped_unmatched=unmatched,
        event_tag=store.event_tag,
    )


# ---------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------


def export_lexicon(lexicon: HashtagLexicon, path: str | Path) -> Path:
    """Write the lexicon as ``hashtag<TAB>label`` sorted by hashtag."""
    path = ensure_parent(path)
    frame = pd.DataFrame(
        sorted((tag, label.value) for tag, label in lexicon.entries.items()),
        columns=["hashtag", "label"],
    )
    frame.to_csv(path, sep="\t", index=False, encoding="utf-8", lineterminator="\n")
    return path


def load_lexicon(path: str | Path) -> HashtagLexicon:
    """Read a lexicon written by :func:`export_lexicon`."""
    frame = pd.read_csv(path, sep="\t", dtype=str, keep_default_na=False, encoding="utf-8")
    return HashtagLexicon(
        entries={row.hashtag: parse_label(row.label) for row in frame.itertuples(index=False)}
    )


def export_labeled(corpus: LabeledCorpus, path: str | Path) -> Path:
    """
    Write labeled records as JSONL with a ``label`` field.

    Solidarity records come first, each group in corpus order.
    """

    def rows():
        for label, records in corpus.groups().items():
            for record in records:
                row = record.to_dict()
                row["label"] = label.value
                yield row

    write_jsonl(path, rows())
    return Path(path)


def load_labeled(
    path: str | Path,
    event_tag: str = "",
    dropped_conflicts: int = 0,
    dropped_unmatched: int = 0,
) -> LabeledCorpus:
    """
    Read a labeled JSONL written by :func:`export_labeled`.

    Args:
        path: Labeled JSONL.
        event_tag: Event identifier to attach.
        dropped_conflicts: Conflict count carried from the labeling summary.
        dropped_unmatched: Unmatched count carried from the labeling summary.

    Returns:
        LabeledCorpus.
    """
    groups: Dict[Label, List[TweetRecord]] = {
        Label.SOLIDARITY: [],
        Label.NOT_SOLIDARITY: [],
    }
    for line_no, obj, error in iter_jsonl(path):
        if error:
            raise ValueError(f"{path}:{line_no}: {error}")
        label = parse_label(obj["label"])
        groups[label].append(TweetRecord.from_dict(obj))

    return LabeledCorpus(
        solidarity=groups[Label.SOLIDARITY],
        not_solidarity=groups[Label.NOT_SOLIDARITY],
        dropped_conflicts=dropped_conflicts,
        dropped_unmatched=dropped_unmatched,
        event_tag=event_tag,
    )


if __name__ == "__main__":
    S, N = Label.SOLIDARITY, Label.NOT_SOLIDARITY
    first = [HashtagAnnotation(f"t{i}", lab, "a") for i, lab in enumerate([S, S, S, N])]
    second = [HashtagAnnotation(f"t{i}", lab, "b") for i, lab in enumerate([S, S, N, N])]

    print("=== labeling demo ===")
    print(compute_kappa(first, second))
