"""Lazily sampled decreasing-arity tree and exact open-path counting.

The tree has root arity L, then L-1, ..., 1; the L! leaves all carry the
value 1 and the root carries x.  A node value is a pure function of
(seed, path digest): the value of child c of a node with digest d is
uniform_from_hash(splitmix64(d + c + 1)).  Because values are keyed by
position rather than draw order, a pruned DFS and a full enumeration
replay exactly the same realization.

The expected number of alive (open-prefix) nodes is about (2-x)^L, so
exact sampling blows up quickly with L; every walker carries a visit
budget and exceeding it is an error distinct from "zero paths".
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import derive_seed, splitmix64, uniform_from_hash

_M64 = (1 << 64) - 1

DEFAULT_NODE_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    """Visit budget exhausted before the walk finished."""


@dataclass(frozen=True)
class TreeParams:
    dim: int
    root_value: float
    seed: int
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 0.0 <= self.root_value <= 1.0:
            raise ValueError(f"root value must be in [0, 1], got {self.root_value}")
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass(frozen=True)
class AliveFront:
    """Open prefixes at one level: (node value, digest) per alive node."""

    level: int
    values: tuple[float, ...]
    digests: tuple[int, ...]


def _root_digest(seed: int) -> int:
    return splitmix64(seed & _M64)


def _child_hash(digest: int, child: int) -> int:
    return splitmix64((digest + child + 1) & _M64)


def sample_theta_tree(params: TreeParams) -> int:
    """Exact Theta for the seeded realization, by pruned DFS.

    Only open prefixes are expanded.  A node at level L-1 with value < 1
    contributes exactly one open path (its single leaf child carries 1).
    """
    L = params.dim
    budget = params.node_budget
    visited = 0
    theta = 0
    root = (0, params.root_value, _root_digest(params.seed))
    if L == 1:
        return 1 if params.root_value < 1.0 else 0
    stack = [root]
    while stack:
        level, val, dig = stack.pop()
        child_level = level + 1
        for c in range(L - level):
            visited += 1
            if visited > budget:
                raise BudgetExceededError(
                    f"node budget {budget} exhausted at level {child_level}"
                )
            ch = _child_hash(dig, c)
            cv = uniform_from_hash(ch)
            if cv > val:
                if child_level == L - 1:
                    theta += 1
                else:
                    stack.append((child_level, cv, ch))
    return theta


def alive_front(params: TreeParams, k: int) -> AliveFront:
    """Open prefixes at level k, by level-limited BFS."""
    L = params.dim
    if not 0 <= k < L:
        raise ValueError(f"need 0 <= k < dim, got k={k}")
    values = [params.root_value]
    digests = [_root_digest(params.seed)]
    visited = 0
    for level in range(k):
        nv: list[float] = []
        nd: list[int] = []
        for val, dig in zip(values, digests):
            for c in range(L - level):
                visited += 1
                if visited > params.node_budget:
                    raise BudgetExceededError(
                        f"node budget {params.node_budget} exhausted at level {level + 1}"
                    )
                ch = _child_hash(dig, c)
                cv = uniform_from_hash(ch)
                if cv > val:
                    nv.append(cv)
                    nd.append(ch)
        values, digests = nv, nd
    return AliveFront(level=k, values=tuple(values), digests=tuple(digests))


def theta_k_from_front(front_values, L: int, k: int) -> float:
    """Conditional expectation of Theta given an explicit alive front:
    sum over open level-k nodes of (L-k)(1 - value)^(L-k-1)."""
    return float(sum((L - k) * (1.0 - v) ** (L - k - 1) for v in front_values))


def theta_k_tree(params: TreeParams, k: int) -> float:
    """Exact conditional expectation of Theta given the first k levels."""
    front = alive_front(params, k)
    return theta_k_from_front(front.values, params.dim, k)


def _has_open_path(params: TreeParams) -> bool:
    """Early-exit DFS; True on the first alive level L-1 node."""
    L = params.dim
    if L == 1:
        return params.root_value < 1.0
    visited = 0
    stack = [(0, params.root_value, _root_digest(params.seed))]
    while stack:
        level, val, dig = stack.pop()
        child_level = level + 1
        for c in range(L - level):
            visited += 1
            if visited > params.node_budget:
                raise BudgetExceededError(
                    f"node budget {params.node_budget} exhausted at level {child_level}"
                )
            ch = _child_hash(dig, c)
            cv = uniform_from_hash(ch)
            if cv > val:
                if child_level == L - 1:
                    return True
                stack.append((child_level, cv, ch))
    return False


@dataclass(frozen=True)
class ExistenceEstimate:
    estimate: float
    stderr: float
    budget_hits: int
    samples: int


def tree_existence_mc(
    L: int,
    x: float,
    samples: int,
    seed: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> ExistenceEstimate:
    """Monte Carlo estimate of P^x(Theta >= 1) over derived replica seeds.

    Realizations that exhaust the budget are excluded from the estimate
    and reported in budget_hits, never counted as zero.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    hits = 0
    budget_hits = 0
    for r in range(samples):
        params = TreeParams(L, x, derive_seed(seed, r), budget)
        try:
            if _has_open_path(params):
                hits += 1
        except BudgetExceededError:
            budget_hits += 1
    n_eff = samples - budget_hits
    if n_eff == 0:
        return ExistenceEstimate(float("nan"), float("nan"), budget_hits, samples)
    p = hits / n_eff
    se = (p * (1.0 - p) / n_eff) ** 0.5
    return ExistenceEstimate(p, se, budget_hits, samples)


def enumerate_tree_paths_oracle(params: TreeParams) -> int:
    """Reference count: walk all L! root-leaf paths on the replayed value
    stream and count the strictly increasing ones.  Values are recomputed
    from the same digest scheme the DFS uses, so both see one realization.
    """
    L = params.dim
    if L > 8:
        raise ValueError(f"oracle limited to dim <= 8, got {L}")
    root_dig = _root_digest(params.seed)

    # Full enumeration, no pruning shortcut: visit every path explicitly.
    def walk_all(level: int, val: float, dig: int, open_so_far: bool) -> int:
        if level == L - 1:
            return 1 if (open_so_far and val < 1.0) else 0
        count = 0
        for c in range(L - level):
            ch = _child_hash(dig, c)
            cv = uniform_from_hash(ch)
            count += walk_all(level + 1, cv, ch, open_so_far and cv > val)
        return count

    return walk_all(0, params.root_value, root_dig, True)
