"""
Randomness utilities for the analytics pipeline.

Centralizes seeded random behavior so that every stage is reproducible
from a single integer seed.
"""

from __future__ import annotations

import random
from typing import List, Sequence, TypeVar

import numpy as np


T = TypeVar("T")

DEFAULT_SEED = 42


def set_seed(seed: int) -> None:
    """Globally set the stdlib and legacy numpy seeds."""
    random.seed(seed)
    np.random.seed(seed)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Create an independent numpy generator for one task.

    Extra ``stream`` integers derive child streams (e.g. a fold number) so
    parallel tasks never share state.

    Args:
        seed: Base seed.
        stream: Optional stream identifiers.

    Returns:
        A fresh ``numpy.random.Generator``.
    """
    return np.random.default_rng([seed, *stream])


def seeded_sample(items: Sequence[T], k: int, seed: int) -> List[T]:
    """
    Draw ``k`` items without replacement, preserving their original order.

    Args:
        items: Population.
        k: Sample size (0 ≤ k ≤ len(items)).
        seed: Seed for the draw.

    Returns:
        Selected items in population order.
    """
    if not 0 <= k <= len(items):
        raise ValueError("Sample size must be between 0 and the population size")

    rng = make_rng(seed)
    chosen = np.sort(rng.choice(len(items), size=k, replace=False))
    return [items[i] for i in chosen]


def seeded_resample(items: Sequence[T], k: int, seed: int) -> List[T]:
    """
    Draw ``k`` items with replacement (used for oversampling).

    Args:
        items: Non-empty population.
        k: Number of draws.
        seed: Seed for the draw.

    Returns:
        Drawn items in draw order.
    """
    if not items:
        raise ValueError("Population cannot be empty")

    rng = make_rng(seed)
    return [items[i] for i in rng.integers(0, len(items), size=k)]


if __name__ == "__main__":
    print("=== random_utils demo ===")

    population = list("abcdefghij")
    print(seeded_sample(population, 4, seed=DEFAULT_SEED))
    print(seeded_resample(population, 4, seed=DEFAULT_SEED))

    print("[✅] random_utils demo completed successfully.")
