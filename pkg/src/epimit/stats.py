"""Seeding and confidence-interval helpers shared by the Monte-Carlo estimators."""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

# Samples are drawn in fixed-size blocks, each from its own stream, so the
# sample set never depends on how many workers produced it.
BLOCK = 1024


def derive_seed(root: int, *path) -> int:
    """64-bit seed for the task at ``path`` under ``root``; order-independent by construction."""
    key = "/".join([str(int(root))] + [str(p) for p in path])
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "little")


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), block])))


def hoeffding_half_width(value_range: float, samples: int, confidence: float = 0.9) -> float:
    """Two-sided Hoeffding radius for a mean of ``samples`` variables bounded in a range of width ``value_range``."""
    if samples < 1:
        raise ValueError("need at least one sample")
    alpha = 1.0 - confidence
    return value_range * math.sqrt(math.log(2.0 / alpha) / (2.0 * samples))


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float
    rounds: int
    successes: int | None = None
    resamples: int = 0
    failures: int = 0


def thread_count(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("EPIMIT_THREADS")
    if env:
        return max(1, int(env))
    return 1


def ordered_map(fn: Callable[..., T], items: Sequence, threads: int | None = None) -> list[T]:
    """``[fn(x) for x in items]``, possibly on a thread pool, results kept in input order."""
    workers = min(thread_count(threads), max(len(items), 1))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
