"""Monte Carlo batch drivers over derived replica streams.

These wrap the exact per-realization routines in `hypercube` and `tree`
into replica loops keyed by (master_seed, replica); aggregation is a
plain concatenation in replica order, so results do not depend on thread
count or completion order.
"""

from __future__ import annotations

from functools import partial

import numpy as np

from . import hypercube, tree
from .parallel import map_replicas
from .rng import derive_seed


def _hypercube_theta_chunk(L, x, seed, start, stop):
    out = np.empty(stop - start, dtype=np.int64)
    for i, r in enumerate(range(start, stop)):
        land = hypercube.generate_hypercube(L, x, seed, replica=r)
        out[i] = hypercube.count_open_paths(land)
    return out


def hypercube_theta_batch(
    L: int, x: float, seed: int, samples: int, threads: int | None = None
) -> np.ndarray:
    worker = partial(_hypercube_theta_chunk, L, x, seed)
    return map_replicas(worker, samples, threads)


def _hypercube_theta_k_chunk(L, x, seed, k, factorized, start, stop):
    fn = hypercube.theta_k_factorized if factorized else hypercube.theta_k_hypercube
    out = np.empty(stop - start)
    for i, r in enumerate(range(start, stop)):
        land = hypercube.generate_hypercube(L, x, seed, replica=r)
        out[i] = fn(land, k)
    return out


def hypercube_theta_k_batch(
    L: int,
    x: float,
    k: int,
    seed: int,
    samples: int,
    factorized: bool = False,
    threads: int | None = None,
) -> np.ndarray:
    worker = partial(_hypercube_theta_k_chunk, L, x, seed, k, factorized)
    return map_replicas(worker, samples, threads)


def _tree_theta_chunk(L, x, seed, budget, start, stop):
    out = np.empty(stop - start, dtype=np.int64)
    for i, r in enumerate(range(start, stop)):
        params = tree.TreeParams(L, x, derive_seed(seed, r), budget)
        out[i] = tree.sample_theta_tree(params)
    return out


def tree_theta_batch(
    L: int,
    x: float,
    seed: int,
    samples: int,
    budget: int = tree.DEFAULT_NODE_BUDGET,
    threads: int | None = None,
) -> np.ndarray:
    worker = partial(_tree_theta_chunk, L, x, seed, budget)
    return map_replicas(worker, samples, threads)


def _tree_theta_k_chunk(L, x, seed, k, budget, start, stop):
    out = np.empty(stop - start)
    for i, r in enumerate(range(start, stop)):
        params = tree.TreeParams(L, x, derive_seed(seed, r), budget)
        out[i] = tree.theta_k_tree(params, k)
    return out


def tree_theta_k_batch(
    L: int,
    x: float,
    k: int,
    seed: int,
    samples: int,
    budget: int = tree.DEFAULT_NODE_BUDGET,
    threads: int | None = None,
) -> np.ndarray:
    worker = partial(_tree_theta_k_chunk, L, x, seed, k, budget)
    return map_replicas(worker, samples, threads)
