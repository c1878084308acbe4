"""Closed-form moments and pair combinatorics against exact rational oracles."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathscape import moments
from pathscape.moments import (
    a_bound_check,
    a_bound_smallest_violating_L,
    a_coeff,
    cond_var_tree,
    expected_paths,
    indecomposable_count,
    log_a_coeff,
    pair_open_prob_tree,
    pstar_upper_bound,
    q0,
    scaled_limits,
    second_moment_hypercube,
    second_moment_tree,
    tree_pair_count,
    var_hypercube,
    var_star_tree,
    var_tree,
)


def _a_exact(L: int, q: int) -> Fraction:
    """a(L,q) = L!(2L-2q-2)! / ((L-q-2)!(2L-q-2)!) in exact arithmetic."""
    return Fraction(
        math.factorial(L) * math.factorial(2 * L - 2 * q - 2),
        math.factorial(L - q - 2) * math.factorial(2 * L - q - 2),
    )


def test_expected_paths_trivial():
    assert expected_paths(4, 0.0) == 4.0
    assert expected_paths(5, 1.0) == 0.0
    assert expected_paths(1, 0.3) == 1.0


@given(L=st.integers(2, 30), data=st.data())
@settings(max_examples=60, deadline=None)
def test_a_coeff_matches_exact_rational(L, data):
    q = data.draw(st.integers(0, L - 2))
    exact = _a_exact(L, q)
    assert a_coeff(L, q) == pytest.approx(float(exact), rel=1e-10)
    assert log_a_coeff(L, q) == pytest.approx(
        math.log(exact.numerator) - math.log(exact.denominator), abs=1e-10
    )


@pytest.mark.parametrize("L", [12, 100, 10**4])
def test_a_boundary_values(L):
    # frozen from exact rational arithmetic on the defining factorial ratio
    assert _a_exact(L, L - 2) == 2
    assert _a_exact(L, L - 3) == Fraction(24, L + 1)
    assert _a_exact(L, L - 4) == Fraction(360, (L + 1) * (L + 2))
    assert a_coeff(L, L - 2) == pytest.approx(2.0, rel=1e-10)
    assert a_coeff(L, L - 3) == pytest.approx(24.0 / (L + 1), rel=1e-10)
    assert a_coeff(L, L - 4) == pytest.approx(
        360.0 / ((L + 1) * (L + 2)), rel=1e-10
    )


def test_a_small_q_asymptotics():
    # a(L,q) * 2^q / L^2 -> 1 for fixed q as L grows
    for q in (0, 1, 3):
        gaps = [abs(a_coeff(L, q) * 2**q / L**2 - 1.0) for L in (100, 1000, 10**4)]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 1e-2


def test_split_bound_report():
    rep = a_bound_check(100)
    assert not rep.holds
    assert rep.first_violation_q == 6
    assert rep.max_log_excess > 0
    assert a_bound_check(10**4).holds
    # exact-arithmetic scan put the threshold at L = 900
    assert a_bound_check(899).holds is False
    assert a_bound_check(900).holds
    assert a_bound_smallest_violating_L([100, 500, 2000]) == 100
    assert a_bound_smallest_violating_L([900, 2000]) is None


def test_q0_value():
    assert q0(100) == math.ceil(math.log(10**4) / math.log(2) + 1)
    with pytest.raises(ValueError):
        q0(5)


@given(L=st.integers(2, 40), x=st.floats(0.0, 0.999))
@settings(max_examples=60, deadline=None)
def test_variance_nonnegative(L, x):
    assert second_moment_tree(L, x) >= expected_paths(L, x) ** 2 - 1e-9
    assert var_tree(L, x) >= -1e-9


def test_second_moment_exact_small_L():
    # direct exact sum over shared-bond classes at L=5, x=1/4
    L, x = 5, Fraction(1, 4)
    exact = sum(
        _a_exact(L, q) * (1 - x) ** (2 * L - q - 2) for q in range(L - 1)
    ) + L * (1 - x) ** (L - 1)
    assert second_moment_tree(L, 0.25) == pytest.approx(float(exact), rel=1e-12)


def test_var_star_exact_small_L():
    L = 5
    exact = sum(_a_exact(L, q) / (2 * L - q - 1) for q in range(L - 1))
    assert var_star_tree(L) == pytest.approx(float(exact), rel=1e-12)


def test_cond_var_exact_small_L():
    # tail sum + isolated term + first moment, all in exact arithmetic
    L, x, k = 6, Fraction(1, 5), 2
    log_terms = [
        _a_exact(L, q) * (1 - x) ** (2 * L - q - 2) for q in range(L - 1)
    ]
    exact = (
        sum(log_terms[k + 1 :])
        - log_terms[k] / (L - k - 1)
        + L * (1 - x) ** (L - 1)
    )
    assert cond_var_tree(L, 0.2, k) == pytest.approx(float(exact), rel=1e-12)


def test_limits_at_large_L():
    L = 10**6
    assert var_star_tree(L) / L == pytest.approx(1.0, abs=1e-3)
    sm = scaled_limits(L, 1.0, moments.REGIME_X_OVER_L)
    assert sm.var_scaled == pytest.approx(math.exp(-2.0), abs=1e-3)
    assert sm.mean_scaled == pytest.approx(math.exp(-1.0), abs=1e-3)
    sm = scaled_limits(L, 0.0, moments.REGIME_LOG_OVER_L)
    assert sm.var_scaled == pytest.approx(2.0, abs=0.05)
    for k in range(1, 11):
        assert cond_var_tree(L, 0.0, k) / L**2 == pytest.approx(2.0**-k, abs=1e-3)


def test_scaled_limits_validation():
    with pytest.raises(ValueError):
        scaled_limits(10**6, 0.0, "bogus")
    with pytest.raises(ValueError):
        scaled_limits(10, -20.0, moments.REGIME_X_OVER_L)


def test_indecomposable_counts():
    assert [indecomposable_count(n) for n in range(1, 6)] == [1, 1, 3, 13, 71]


@given(n=st.integers(1, 9))
@settings(max_examples=20, deadline=None)
def test_indecomposable_inversion_identity(n):
    # n! = sum over first-return points of B(k) (n-k)!
    total = sum(
        indecomposable_count(k) * math.factorial(n - k) for k in range(1, n + 1)
    )
    assert total == math.factorial(n)


def test_tree_pair_count_exact():
    for L in (3, 5, 8):
        for q in range(L - 1):
            assert tree_pair_count(L, q) == math.factorial(L) * (
                L - q - 1
            ) * math.factorial(L - q - 1)


def test_pair_open_prob_exact_small():
    # (1-x)^(2L-q-2) * C(2L-2q-2, L-q-1) / (2L-q-2)! in exact arithmetic
    L, q, x = 6, 2, Fraction(1, 4)
    exact = (
        (1 - x) ** (2 * L - q - 2)
        * math.comb(2 * L - 2 * q - 2, L - q - 1)
        / Fraction(math.factorial(2 * L - q - 2))
    )
    assert pair_open_prob_tree(L, q, 0.25) == pytest.approx(float(exact), rel=1e-12)


def _second_moment_hypercube_exact(L: int, x: Fraction) -> Fraction:
    """Independent rational evaluation of the shared-node-chain sum:
    pairs meeting along r blocks of sizes (m_1..m_r) contribute
    prod B(m_i) C(2m_i-2, m_i-1) * L! (1-x)^(2L-r-1) / (2L-r-1)!."""
    w = {
        m: indecomposable_count(m) * math.comb(2 * m - 2, m - 1)
        for m in range(1, L + 1)
    }
    f = [[0] * (L + 1) for _ in range(L + 1)]
    f[0][0] = 1
    for rem in range(1, L + 1):
        for r in range(1, rem + 1):
            f[rem][r] = sum(w[m] * f[rem - m][r - 1] for m in range(1, rem + 1))
    total = Fraction(0)
    for r in range(1, L + 1):
        nf = 2 * L - r - 1
        total += f[L][r] * (1 - x) ** nf / math.factorial(nf)
    return math.factorial(L) * total


def test_second_moment_hypercube_two_cube_closed_form():
    # Theta = 1(a > x) + 1(b > x) on the 2-cube, so
    # E[Theta^2] = 2(1-x) + 2(1-x)^2
    x = 0.3
    assert second_moment_hypercube(2, x) == pytest.approx(
        2 * (1 - x) + 2 * (1 - x) ** 2, rel=1e-14
    )


@pytest.mark.parametrize("L", [3, 5, 8])
def test_second_moment_hypercube_vs_exact_rational(L):
    x = Fraction(1, 7)
    exact = _second_moment_hypercube_exact(L, x)
    assert second_moment_hypercube(L, float(x)) == pytest.approx(
        float(exact), rel=1e-12
    )


def test_second_moment_hypercube_mc_cross_check():
    # all-path enumeration on sampled 5-cubes, matched against the exact sum
    import numpy as np

    from pathscape import hypercube, stats

    L, x, n = 5, 0.2, 4000
    sq = np.array(
        [
            float(
                hypercube.count_open_paths(
                    hypercube.generate_hypercube(L, x, 31337, replica=r)
                )
            )
            ** 2
            for r in range(n)
        ]
    )
    summ = stats.moment_summary(stats.Sample.from_values(sq))
    assert abs(summ.mean - second_moment_hypercube(L, x)) <= 4 * summ.mean_stderr


def test_var_hypercube_frozen_scaled_value():
    # Var(Theta/L) at L=16, x=1/16; value frozen from the exact rational sum
    assert var_hypercube(16, 1 / 16) / 16**2 == pytest.approx(
        0.8101132102097044, rel=1e-10
    )


def test_var_hypercube_scaled_convergence():
    # Var(Theta/L) at x = 1/L approaches 3e^-2 from above, slowly
    limit = 3 * math.exp(-2)
    gaps = [var_hypercube(L, 1 / L) / L**2 / limit - 1.0 for L in (16, 32, 64, 128)]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_pstar_upper_bound_values():
    assert pstar_upper_bound(2) == pytest.approx(0.75, abs=1e-14)
    # value * L / ln L -> 1 along a sweep
    gaps = [
        abs(pstar_upper_bound(L) * L / math.log(L) - 1.0)
        for L in (10**3, 10**5, 10**7)
    ]
    assert gaps == sorted(gaps, reverse=True)


def test_log_convexity_at_L100():
    log_a = [log_a_coeff(100, q) for q in range(99)]
    second = [
        log_a[i + 1] - 2 * log_a[i] + log_a[i - 1] for i in range(1, 97)
    ]
    assert min(second) >= -1e-12
