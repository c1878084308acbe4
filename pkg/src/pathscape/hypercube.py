"""House-of-Cards landscapes on {0,1}^L and exact open-path counting.

Nodes are bitmask integers; the level of a node is its popcount.  A path
goes from 0...0 (value x) to 1...1 (value 1) flipping one 0 into a 1 per
step, and is *open* when the node values strictly increase along it.
Counting is a level-by-level dynamic program over bitmasks: the number of
open paths into a node is the sum over its one-bit-lower predecessors
with strictly smaller value.

Ties in fitness are treated as blocking (strict inequality), a
probability-zero event under the continuous model but deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rng import philox_stream

DEFAULT_DIM_CAP = 24
ORACLE_DIM_CAP = 8

# int64 head-room guard for the DP: before summing up to L predecessor
# counts, the previous level's max must leave room for the sum.
_I64_MAX = (1 << 63) - 1


class PathCountOverflowError(OverflowError):
    """Open-path count would exceed the checked 64-bit range."""


@dataclass(frozen=True)
class HypercubeLandscape:
    """Fitness values on {0,1}^L, indexed by bitmask.

    fitness[0] == origin_value, fitness[2^L - 1] == 1.0 exactly; interior
    values are i.i.d. uniform draws assigned in ascending bitmask order.
    """

    dim: int
    origin_value: float
    fitness: np.ndarray

    def __post_init__(self):
        if self.fitness.shape != (1 << self.dim,):
            raise ValueError("fitness array size must be 2^dim")


@dataclass(frozen=True)
class LevelCounts:
    """Open-prefix counts for every node of one level.

    ``counts[i]`` is the number of open paths from the starting corner to
    ``masks[i]`` (or from ``masks[i]`` to the top corner when mirrored).
    """

    level: int
    from_top: bool
    masks: np.ndarray
    counts: np.ndarray


def generate_hypercube(
    L: int, x: float, seed: int, replica: int = 0, dim_cap: int = DEFAULT_DIM_CAP
) -> HypercubeLandscape:
    """Draw a seeded landscape; same (L, x, seed, replica) is bit-exact."""
    if not 1 <= L <= dim_cap:
        raise ValueError(f"dim must be in [1, {dim_cap}], got {L}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"origin value must be in [0, 1], got {x}")
    rng = philox_stream(seed, replica)
    fitness = rng.random(1 << L)
    fitness[0] = x
    fitness[-1] = 1.0
    fitness.setflags(write=False)
    return HypercubeLandscape(dim=L, origin_value=x, fitness=fitness)


def _popcounts(masks: np.ndarray) -> np.ndarray:
    v = masks.astype(np.int64)
    out = np.zeros_like(v)
    while v.any():
        out += v & 1
        v >>= 1
    return out


@lru_cache(maxsize=8)
def _masks_and_pos(L: int):
    """Masks grouped by level plus a rank-within-level lookup table."""
    all_masks = np.arange(1 << L, dtype=np.int64)
    pc = _popcounts(all_masks)
    masks = [all_masks[pc == k] for k in range(L + 1)]
    pos = np.empty(1 << L, dtype=np.int64)
    for k in range(L + 1):
        pos[masks[k]] = np.arange(len(masks[k]))
    return masks, pos


@lru_cache(maxsize=64)
def _preds(L: int, k: int) -> np.ndarray:
    """Indices (into level k-1) of the k predecessors of each level-k node."""
    masks, pos = _masks_and_pos(L)
    mk = masks[k]
    out = np.empty((len(mk), k), dtype=np.int64)
    col = np.zeros(len(mk), dtype=np.int64)
    for b in range(L):
        rows = np.nonzero((mk >> b) & 1)[0]
        out[rows, col[rows]] = pos[mk[rows] ^ (1 << b)]
        col[rows] += 1
    return out


def _counts_from_origin(land: HypercubeLandscape, k_max: int) -> list[np.ndarray]:
    """Per-level open-prefix counts n_sigma for levels 0..k_max."""
    L = land.dim
    masks, _ = _masks_and_pos(L)
    f = land.fitness
    levels = [np.ones(1, dtype=np.int64)]
    for k in range(1, k_max + 1):
        if levels[-1].max() > _I64_MAX // max(k, 1):
            raise PathCountOverflowError(f"path count overflow at level {k}")
        pr = _preds(L, k)
        open_edge = f[masks[k - 1]][pr] < f[masks[k]][:, None]
        levels.append(np.where(open_edge, levels[-1][pr], 0).sum(axis=1))
    return levels


def _counts_from_top(land: HypercubeLandscape, k_steps: int) -> list[np.ndarray]:
    """Counts m_tau of open paths from each node to 1...1, for the top
    k_steps levels (returned bottom-up: index j holds level L-j)."""
    L = land.dim
    masks, _ = _masks_and_pos(L)
    f = land.fitness
    levels = [np.ones(1, dtype=np.int64)]
    for j in range(1, k_steps + 1):
        k = L - j + 1  # level whose predecessors we scatter into
        if levels[-1].max() > _I64_MAX // max(k, 1):
            raise PathCountOverflowError(f"path count overflow {j} below top")
        pr = _preds(L, k)
        open_edge = f[masks[k - 1]][pr] < f[masks[k]][:, None]
        m = np.zeros(len(masks[k - 1]), dtype=np.int64)
        np.add.at(
            m,
            pr[open_edge],
            np.broadcast_to(levels[-1][:, None], pr.shape)[open_edge],
        )
        levels.append(m)
    return levels


def count_open_paths(land: HypercubeLandscape) -> int:
    """Exact number of open paths from 0...0 to 1...1 (checked 64-bit)."""
    theta = int(_counts_from_origin(land, land.dim)[-1][0])
    return theta


def path_exists(land: HypercubeLandscape) -> bool:
    """True iff at least one open path exists; short-circuits on the first
    full path found (DFS with a dead-node memo)."""
    L = land.dim
    f = land.fitness
    full = (1 << L) - 1
    dead: set[int] = set()

    def dfs(mask: int) -> bool:
        if mask == full:
            return True
        fm = f[mask]
        rest = ~mask & full
        while rest:
            bit = rest & -rest
            rest ^= bit
            nxt = mask | bit
            if nxt not in dead and f[nxt] > fm and dfs(nxt):
                return True
        dead.add(mask)
        return False

    return dfs(0)


def level_counts(land: HypercubeLandscape, k: int, from_top: bool = False) -> LevelCounts:
    """Open-prefix counts at level k (k steps from the chosen corner)."""
    L = land.dim
    if not 0 <= k <= L:
        raise ValueError(f"level must be in [0, {L}], got {k}")
    masks, _ = _masks_and_pos(L)
    if from_top:
        counts = _counts_from_top(land, k)[-1]
        return LevelCounts(level=k, from_top=True, masks=masks[L - k], counts=counts)
    counts = _counts_from_origin(land, k)[-1]
    return LevelCounts(level=k, from_top=False, masks=masks[k], counts=counts)


def theta_k_hypercube(land: HypercubeLandscape, k: int) -> float:
    """Conditional expectation of the path count given the first k levels
    seen from both corners.

    Sums n_sigma * m_tau * (L-2k) * (1 - y_tau - x_sigma)^(L-2k-1) over
    comparable pairs (sigma subset of tau) with x_sigma + y_tau <= 1,
    where y_tau = 1 - value(tau).
    """
    L = land.dim
    if not 0 <= 2 * k < L:
        raise ValueError(f"need 0 <= 2k < L, got k={k}, L={L}")
    masks, _ = _masks_and_pos(L)
    n = _counts_from_origin(land, k)[-1].astype(float)
    m = _counts_from_top(land, k)[-1].astype(float)
    sig = masks[k]
    tau = masks[L - k]
    xs = land.fitness[sig]
    ys = 1.0 - land.fitness[tau]
    comparable = (sig[:, None] & ~tau[None, :]) == 0
    base = 1.0 - xs[:, None] - ys[None, :]
    ok = comparable & (base >= 0.0)
    w = np.zeros_like(base)
    w[ok] = (L - 2 * k) * base[ok] ** (L - 2 * k - 1)
    return float(n @ w @ m)


def theta_k_factorized(land: HypercubeLandscape, k: int) -> float:
    """Factorized upper proxy: the product of the two corner sums
    sum_sigma n_sigma (1-x_sigma)^(L-2k-1) * sum_tau m_tau (1-y_tau)^(L-2k-1).

    Dominates theta_k_hypercube(land, k) / L pointwise.
    """
    L = land.dim
    if not 0 <= 2 * k < L:
        raise ValueError(f"need 0 <= 2k < L, got k={k}, L={L}")
    masks, _ = _masks_and_pos(L)
    n = _counts_from_origin(land, k)[-1].astype(float)
    m = _counts_from_top(land, k)[-1].astype(float)
    xs = land.fitness[masks[k]]
    ys = 1.0 - land.fitness[masks[L - k]]
    e = L - 2 * k - 1
    return float((n * (1.0 - xs) ** e).sum() * (m * (1.0 - ys) ** e).sum())


def enumerate_paths_oracle(land: HypercubeLandscape) -> int:
    """Reference count: iterate all L! coordinate orders explicitly."""
    L = land.dim
    if L > ORACLE_DIM_CAP:
        raise ValueError(f"oracle limited to L <= {ORACLE_DIM_CAP}, got {L}")
    f = land.fitness
    total = 0
    for order in itertools.permutations(range(L)):
        mask = 0
        prev = f[0]
        for bit in order:
            mask |= 1 << bit
            v = f[mask]
            if not v > prev:
                break
            prev = v
        else:
            total += 1
    return total
