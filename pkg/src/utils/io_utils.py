"""
File helpers shared by the pipeline stages.

Outputs are written deterministically: JSON with sorted keys and a fixed
indent, UTF-8 everywhere, ``\\n`` line endings.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Tuple


def sha256_file(path: str | Path) -> str:
    """
    Hex SHA-256 digest of a file's bytes.

    Args:
        path: File to hash.

    Returns:
        Lowercase hex digest.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def ensure_parent(path: str | Path) -> Path:
    """Create the parent directory of ``path`` and return it as a Path."""
    path = Path(path)
    os.makedirs(path.parent, exist_ok=True)
    return path


def write_json(path: str | Path, payload: Any) -> Path:
    """
    Write JSON with sorted keys so identical payloads give identical bytes.

    Args:
        path: Destination file.
        payload: JSON-serializable object.

    Returns:
        The written path.
    """
    path = ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return path


def read_json(path: str | Path) -> Any:
    """Load a JSON file."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_jsonl(path: str | Path, rows: Iterable[Dict[str, Any]]) -> int:
    """
    Write one JSON object per line.

    Args:
        path: Destination file.
        rows: Dictionaries to serialize.

    Returns:
        Number of rows written.
    """
    path = ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            f.write("\n")
            count += 1
    return count


def iter_jsonl(path: str | Path) -> Iterator[Tuple[int, Any, str]]:
    """
    Iterate over a JSONL file without failing on bad lines.

    Blank lines are skipped. Each item is ``(line_number, obj, error)``
    where ``obj`` is None and ``error`` non-empty when the line does not
    parse.

    Args:
        path: JSONL file.

    Yields:
        Tuples of line number, parsed object and error message.
    """
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield line_no, json.loads(line), ""
            except json.JSONDecodeError as exc:
                yield line_no, None, str(exc)


if __name__ == "__main__":
    import tempfile

    print("=== io_utils demo ===")
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "rows.jsonl"
        write_jsonl(target, [{"id": "1", "text": "stay safe"}])
        print(list(iter_jsonl(target)), sha256_file(target))
    print("[✅] io_utils demo completed successfully.")
