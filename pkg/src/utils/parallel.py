"""
Chunked data parallelism with deterministic merging.

Work is split into contiguous chunks, each chunk produces a partial
``Counter``, and partials are summed in chunk order. Addition is
commutative, so the result does not depend on the thread count.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar


T = TypeVar("T")


def _chunks(items: Sequence[T], n_chunks: int) -> List[Sequence[T]]:
    size = max(1, -(-len(items) // n_chunks))
    return [items[i : i + size] for i in range(0, len(items), size)]


def parallel_count(
    items: Sequence[T],
    count_chunk: Callable[[Sequence[T]], Counter],
    threads: int = 1,
) -> Counter:
    """
    Apply ``count_chunk`` to chunks of ``items`` and merge the counters.

    Args:
        items: Input records.
        count_chunk: Function turning a chunk into a partial Counter.
        threads: Worker count; 1 runs inline.

    Returns:
        Merged Counter.
    """
    if threads <= 1 or len(items) < 2:
        return count_chunk(items)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        partials = list(pool.map(count_chunk, _chunks(items, threads)))

    merged: Counter = Counter()
    for partial in partials:
        merged.update(partial)
    return merged
