"""Replica-parallel map with order-independent, deterministic results.

Each replica owns a private stream derived from (master_seed, replica
index), so splitting the replica range across workers cannot change any
drawn value; chunks are reassembled in index order, making the output
identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

ENV_THREADS = "PATHSCAPE_THREADS"


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def map_replicas(
    worker: Callable[[int, int], np.ndarray],
    n_replicas: int,
    threads: int | None = None,
) -> np.ndarray:
    """Run worker(start, stop) over a partition of range(n_replicas) and
    concatenate the chunk results in index order."""
    threads = resolve_threads(threads)
    if threads <= 1 or n_replicas < 2 * threads:
        return np.asarray(worker(0, n_replicas))
    bounds = np.linspace(0, n_replicas, threads + 1).astype(int)
    spans: Sequence[tuple[int, int]] = [
        (int(bounds[i]), int(bounds[i + 1])) for i in range(threads)
    ]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(_call_worker, [(worker, a, b) for a, b in spans]))
    return np.concatenate(chunks)


def _call_worker(packed):
    worker, a, b = packed
    return np.asarray(worker(a, b))
