"""Seed derivation and ordered replica fan-out.

Replica ``r`` of a run seeded with ``seed`` always draws from the generator
``replica_rng(seed, r)``, so results do not depend on how many workers ran
them or in which order they finished.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

WORKERS_ENV = "SAMC_WORKERS"


def replica_rng(seed: int, replica: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replica, *keys)))


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Named substream for bulk (non-replicated) work inside a checker."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**31, *keys)))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _call(args):
    fn, seed, r, keys = args
    return fn(replica_rng(seed, r, *keys))


def run_replicas(
    fn: Callable[[np.random.Generator], T],
    seed: int,
    replicas: int | Sequence[int],
    workers: int | None = None,
    *keys: int,
) -> list[T]:
    """Evaluate ``fn`` once per replica, returning results in replica order.

    Extra ``keys`` select an independent family of replica streams. ``fn``
    must be picklable when ``workers > 1``.
    """
    indices = range(replicas) if isinstance(replicas, int) else list(replicas)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(indices) < 2:
        return [fn(replica_rng(seed, r, *keys)) for r in indices]
    chunk = max(1, len(indices) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, [(fn, seed, r, keys) for r in indices], chunksize=chunk))
