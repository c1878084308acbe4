"""Lazily sampled tree: pruned DFS, alive fronts, conditional expectations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathscape import moments, stats, tree
from pathscape.rng import derive_seed
from pathscape.tree import (
    BudgetExceededError,
    TreeParams,
    alive_front,
    enumerate_tree_paths_oracle,
    sample_theta_tree,
    theta_k_from_front,
    theta_k_tree,
    tree_existence_mc,
)

SEED = 424242


@pytest.mark.parametrize("L", range(2, 8))
def test_oracle_equivalence(L):
    for r in range(30):
        params = TreeParams(L, 0.25 * (r % 4) / 3.0, derive_seed(SEED, r))
        assert sample_theta_tree(params) == enumerate_tree_paths_oracle(params)


@given(seed=st.integers(0, 2**32 - 1), L=st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_oracle_equivalence_property(seed, L):
    params = TreeParams(L, 0.0, seed)
    assert sample_theta_tree(params) == enumerate_tree_paths_oracle(params)


def test_determinism():
    params = TreeParams(7, 0.3, 99)
    assert sample_theta_tree(params) == sample_theta_tree(params)
    assert theta_k_tree(params, 2) == theta_k_tree(params, 2)


def test_dim_one_cases():
    assert sample_theta_tree(TreeParams(1, 0.0, 1)) == 1
    assert sample_theta_tree(TreeParams(1, 1.0, 1)) == 0
    assert tree_existence_mc(1, 0.5, 10, SEED).estimate == 1.0
    assert tree_existence_mc(3, 1.0, 10, SEED).estimate == 0.0


@given(
    seed=st.integers(0, 2**32 - 1),
    lo=st.floats(0.0, 1.0),
    hi=st.floats(0.0, 1.0),
)
@settings(max_examples=40, deadline=None)
def test_monotone_pruning_in_root_value(seed, lo, hi):
    lo, hi = min(lo, hi), max(lo, hi)
    # identical value stream (same seed digest scheme), higher root only prunes
    t_lo = sample_theta_tree(TreeParams(6, lo, seed))
    t_hi = sample_theta_tree(TreeParams(6, hi, seed))
    assert t_hi <= t_lo


def test_alive_front_values_exceed_root():
    params = TreeParams(8, 0.35, SEED)
    for k in (1, 2, 3):
        front = alive_front(params, k)
        assert front.level == k
        assert all(v > params.root_value for v in front.values)


def test_theta_k_from_front_hand_values():
    # explicit fronts, sum of (L-k)(1-v)^(L-k-1) over alive values
    got = theta_k_from_front([0.59, 0.90, 0.01, 0.83], L=5, k=2)
    assert got == pytest.approx(3.5613, abs=1e-4)
    got = theta_k_from_front([0.22, 0.66, 0.95], L=4, k=2)
    assert got == pytest.approx(2.34, abs=1e-10)
    assert theta_k_from_front([], L=5, k=2) == 0.0


def test_theta_k_martingale_mean():
    L, x, k, n = 8, 0.2, 2, 3000
    vals = np.array(
        [theta_k_tree(TreeParams(L, x, derive_seed(SEED, r)), k) for r in range(n)]
    )
    summ = stats.moment_summary(stats.Sample.from_values(vals))
    target = moments.expected_paths(L, x)
    assert abs(summ.mean - target) <= 4 * summ.mean_stderr


def test_theta_mean_matches_closed_form(tree_thetas_8):
    summ = stats.moment_summary(stats.Sample.from_values(tree_thetas_8))
    target = moments.expected_paths(8, 0.2)
    assert abs(summ.mean - target) <= 4 * summ.mean_stderr


def test_budget_is_an_error_not_zero():
    with pytest.raises(BudgetExceededError):
        sample_theta_tree(TreeParams(12, 0.0, SEED, node_budget=50))


def test_existence_mc_reports_budget_hits():
    est = tree_existence_mc(12, 0.0, 20, SEED, budget=50)
    assert est.budget_hits == 20
    assert np.isnan(est.estimate)


def test_params_validation():
    with pytest.raises(ValueError):
        TreeParams(0, 0.0, 1)
    with pytest.raises(ValueError):
        TreeParams(3, 1.5, 1)
    with pytest.raises(ValueError):
        TreeParams(3, 0.0, 1, node_budget=0)
    with pytest.raises(ValueError):
        alive_front(TreeParams(3, 0.0, 1), 3)
    with pytest.raises(ValueError):
        enumerate_tree_paths_oracle(TreeParams(9, 0.0, 1))
