"""Hypercube landscape generation and exact open-path counting."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathscape import hypercube, moments, stats
from pathscape.hypercube import (
    HypercubeLandscape,
    count_open_paths,
    enumerate_paths_oracle,
    generate_hypercube,
    level_counts,
    path_exists,
    theta_k_factorized,
    theta_k_hypercube,
)

SEED = 919


def _landscape(fitness) -> HypercubeLandscape:
    arr = np.asarray(fitness, dtype=float)
    L = int(math.log2(len(arr)))
    return HypercubeLandscape(dim=L, origin_value=float(arr[0]), fitness=arr)


def test_hand_counted_two_cube():
    # interior values 0.3 (node 01) and 0.7 (node 10)
    assert count_open_paths(_landscape([0.0, 0.3, 0.7, 1.0])) == 2
    # raising the origin above 0.3 blocks one of the two orders
    assert count_open_paths(_landscape([0.5, 0.3, 0.7, 1.0])) == 1
    # origin above both interior values blocks everything
    assert count_open_paths(_landscape([0.9, 0.3, 0.7, 1.0])) == 0


def test_generation_contract():
    land = generate_hypercube(3, 0.5, seed=7)
    assert land.fitness[0] == 0.5
    assert land.fitness[-1] == 1.0
    assert ((land.fitness >= 0) & (land.fitness <= 1)).all()
    again = generate_hypercube(3, 0.5, seed=7)
    assert np.array_equal(land.fitness, again.fitness)
    other = generate_hypercube(3, 0.5, seed=8)
    assert not np.array_equal(land.fitness, other.fitness)


def test_generation_validation():
    with pytest.raises(ValueError):
        generate_hypercube(0, 0.0, seed=1)
    with pytest.raises(ValueError):
        generate_hypercube(30, 0.0, seed=1)
    with pytest.raises(ValueError):
        generate_hypercube(3, 1.5, seed=1)


@pytest.mark.parametrize("L", range(2, 8))
def test_oracle_equivalence(L):
    for r in range(30):
        land = generate_hypercube(L, 0.3 * (r % 3), SEED, replica=r)
        assert count_open_paths(land) == enumerate_paths_oracle(land)


@given(seed=st.integers(0, 2**32 - 1), L=st.integers(2, 6))
@settings(max_examples=40, deadline=None)
def test_oracle_equivalence_property(seed, L):
    land = generate_hypercube(L, 0.0, seed)
    assert count_open_paths(land) == enumerate_paths_oracle(land)


@given(
    seed=st.integers(0, 2**32 - 1),
    lo=st.floats(0.0, 0.98),
    hi=st.floats(0.0, 0.98),
)
@settings(max_examples=40, deadline=None)
def test_monotone_in_origin_value(seed, lo, hi):
    lo, hi = min(lo, hi), max(lo, hi)
    base = generate_hypercube(5, lo, seed)
    raised_fitness = base.fitness.copy()
    raised_fitness[0] = hi
    raised = _landscape(raised_fitness)
    assert count_open_paths(raised) <= count_open_paths(base)


def test_symmetry_under_coordinate_relabeling():
    L = 5
    for r in range(10):
        land = generate_hypercube(L, 0.1, SEED, replica=r)
        perm = np.random.default_rng(r).permutation(L)
        relabeled = np.empty_like(land.fitness)
        for mask in range(1 << L):
            new_mask = 0
            for b in range(L):
                if (mask >> b) & 1:
                    new_mask |= 1 << int(perm[b])
            relabeled[new_mask] = land.fitness[mask]
        assert count_open_paths(_landscape(relabeled)) == count_open_paths(land)


def test_path_exists_matches_count():
    for r in range(50):
        land = generate_hypercube(6, 0.4, SEED, replica=r)
        assert path_exists(land) == (count_open_paths(land) > 0)


def test_level_counts_invariants():
    land = generate_hypercube(6, 0.2, SEED)
    assert level_counts(land, 0).counts.tolist() == [1]
    for k in range(1, 4):
        lc = level_counts(land, k)
        assert (lc.counts <= math.factorial(k)).all()
        assert (lc.counts >= 0).all()
    top = level_counts(land, 0, from_top=True)
    assert top.counts.tolist() == [1]


def _theta_k_path_oracle(land: HypercubeLandscape, k: int) -> float:
    """Independent reference for theta_k_hypercube: enumerate all L! paths
    and add, for each, the probability that its unseen middle segment is
    increasing and consistent with the seen prefix/suffix endpoints:
    1(prefix open) * 1(suffix open) * gap^(L-2k-1)/(L-2k-1)! with
    gap = value(tau) - value(sigma)."""
    L = land.dim
    f = land.fitness
    n_mid = L - 2 * k - 1
    total = 0.0
    for order in itertools.permutations(range(L)):
        mask = 0
        prefix_vals = [f[0]]
        for bit in order[:k]:
            mask |= 1 << bit
            prefix_vals.append(f[mask])
        sigma_val = prefix_vals[-1]
        if any(b >= a for a, b in zip(prefix_vals[1:], prefix_vals)):
            continue
        full = (1 << L) - 1
        mask_top = full
        suffix_vals = [f[full]]
        for bit in order[::-1][:k]:
            mask_top ^= 1 << bit
            suffix_vals.append(f[mask_top])
        tau_val = suffix_vals[-1]
        if any(b <= a for a, b in zip(suffix_vals[1:], suffix_vals)):
            continue
        gap = tau_val - sigma_val
        if gap < 0:
            continue
        total += gap**n_mid / math.factorial(n_mid)
    return total


@pytest.mark.parametrize("L,k", [(5, 1), (6, 1), (6, 2), (7, 2)])
def test_theta_k_against_path_enumeration(L, k):
    for r in range(5):
        land = generate_hypercube(L, 0.15 * r, SEED, replica=r)
        expect = _theta_k_path_oracle(land, k)
        got = theta_k_hypercube(land, k)
        assert got == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_theta_k_tower_property():
    L, k, x, n = 10, 2, 0.0, 2000
    vals = np.array(
        [
            theta_k_hypercube(generate_hypercube(L, x, SEED, replica=r), k)
            for r in range(n)
        ]
    )
    summ = stats.moment_summary(stats.Sample.from_values(vals))
    target = moments.expected_paths(L, x)
    assert abs(summ.mean - target) <= 4 * summ.mean_stderr


def test_theta_mean_matches_closed_form(hypercube_thetas_10):
    summ = stats.moment_summary(stats.Sample.from_values(hypercube_thetas_10))
    target = moments.expected_paths(10, 0.1)
    assert abs(summ.mean - target) <= 4 * summ.mean_stderr


def test_theta_k_factorized_dominates():
    L = 9
    for r in range(20):
        land = generate_hypercube(L, 0.1, SEED, replica=r)
        for k in (1, 2, 3):
            assert (
                L * theta_k_factorized(land, k)
                >= theta_k_hypercube(land, k) - 1e-9
            )


def test_theta_k_domain():
    land = generate_hypercube(6, 0.0, SEED)
    with pytest.raises(ValueError):
        theta_k_hypercube(land, 3)  # needs 2k < L
    with pytest.raises(ValueError):
        theta_k_hypercube(land, -1)


def test_oracle_dim_cap():
    with pytest.raises(ValueError):
        enumerate_paths_oracle(generate_hypercube(9, 0.0, SEED))


def test_sorted_by_level_gives_all_paths_open():
    # all level-1 values below all level-2 values, increasing along levels
    L = 3
    f = np.array([0.0, 0.1, 0.12, 0.5, 0.14, 0.6, 0.7, 1.0])
    assert count_open_paths(_landscape(f)) == 6
