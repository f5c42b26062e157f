from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from authornet import montecarlo as mc
from authornet.errors import CapacityError, DomainError
from authornet.montecarlo import (
    McConfig,
    exact_expected_matches,
    exact_match_distribution,
    mc_expected_matches,
    simulate_trial,
    validate_grid,
)


def fraction_oracle(n, m, p):
    """E(n, m) by direct recursion on exact rationals."""
    p = Fraction(p)

    @lru_cache(maxsize=None)
    def e(i, j):
        if i == 0 or j == 0:
            return Fraction(0)
        q = 1 - (1 - p) ** j
        return q * (1 + e(i - 1, j - 1)) + (1 - q) * e(i - 1, j)

    return e(min(n, m), max(n, m))


def chi2_pvalue(observed, probs, min_expected=5.0):
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(probs) * observed.sum()
    obs_bins, exp_bins = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e and exp_bins:
        obs_bins[-1] += acc_o
        exp_bins[-1] += acc_e
    if len(exp_bins) < 2:
        return 1.0
    return stats.chisquare(obs_bins, exp_bins).pvalue


# -- single trials ---------------------------------------------------------

def test_trial_extremes():
    rng = np.random.default_rng(0)
    assert all(simulate_trial(7, 9, 0.0, rng) == 0 for _ in range(20))
    assert all(simulate_trial(7, 9, 1.0, rng) == 7 for _ in range(20))
    assert simulate_trial(9, 4, 1.0, rng) == 4


@settings(max_examples=60)
@given(st.integers(0, 12), st.integers(0, 12), st.floats(0, 1), st.integers(0, 2**32))
def test_trial_bounded(n, m, p, seed):
    k = simulate_trial(n, m, p, np.random.default_rng(seed))
    assert 0 <= k <= min(n, m)


def test_trial_rejects_bad_p():
    with pytest.raises(DomainError):
        simulate_trial(2, 2, 1.5, np.random.default_rng(0))


# -- exact oracles ---------------------------------------------------------

def test_exact_examples():
    assert exact_expected_matches(2, 2, 0.5) == 1.3125
    assert fraction_oracle(2, 2, Fraction(1, 2)) == Fraction(21, 16)
    assert exact_expected_matches(5, 8, 0.0) == 0
    for m, p in [(1, 0.3), (10, 0.01), (1000, 1e-4)]:
        assert exact_expected_matches(1, m, p) == pytest.approx(1 - (1 - p) ** m, rel=1e-12)


@pytest.mark.parametrize("n, m", [(1, 1), (2, 5), (3, 3), (4, 7), (6, 6), (8, 3)])
@pytest.mark.parametrize("p", [Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)])
def test_exact_matches_fraction_recursion(n, m, p):
    assert exact_expected_matches(n, m, float(p)) == pytest.approx(float(fraction_oracle(n, m, p)), rel=1e-12)


@pytest.mark.parametrize("n, m, p", [(2, 2, 0.5), (5, 9, 0.1), (20, 20, 0.05), (30, 200, 0.001)])
def test_distribution_mean_matches_recursion(n, m, p):
    pmf = exact_match_distribution(n, m, p)
    assert pmf.sum() == pytest.approx(1.0, abs=1e-12)
    assert (pmf >= 0).all()
    assert pmf @ np.arange(len(pmf)) == pytest.approx(exact_expected_matches(n, m, p), rel=1e-11)


def test_exact_guard():
    with pytest.raises(CapacityError):
        exact_expected_matches(10_000, 10_000, 1e-5)
    with pytest.raises(CapacityError):
        exact_match_distribution(10_000, 10_000, 1e-5)


def test_exact_is_below_analytic():
    for n, m, p in [(2, 2, 0.5), (100, 100, 0.01), (1000, 10_000, 1.05e-5)]:
        assert exact_expected_matches(n, m, p) < mc.expected_matches(n, m, p)


# -- sampler equivalence ---------------------------------------------------

EQUIV_CASES = [(3, 5, 0.2), (4, 4, 0.5), (2, 10, 0.05), (6, 8, 0.3)]


@pytest.mark.parametrize("n, m, p", EQUIV_CASES)
def test_reference_trial_matches_exact_distribution(n, m, p):
    rng = np.random.default_rng(11)
    counts = np.bincount([simulate_trial(n, m, p, rng) for _ in range(6000)], minlength=n + 1)
    assert chi2_pvalue(counts, exact_match_distribution(n, m, p)) > 1e-3


@pytest.mark.parametrize("n, m, p", EQUIV_CASES)
def test_population_sampler_matches_exact_distribution(n, m, p):
    counts = mc.match_count_histogram(n, m, p, 200_000, np.random.default_rng(12))
    assert chi2_pvalue(counts, exact_match_distribution(n, m, p)) > 1e-3


@pytest.mark.parametrize("n, m, p", EQUIV_CASES)
def test_reference_and_population_agree(n, m, p):
    ref = mc_expected_matches(McConfig(n, m, p, 4000, 5), method="reference").counts
    pop = mc_expected_matches(McConfig(n, m, p, 4000, 5)).counts
    table = np.vstack([ref, pop])
    table = table[:, table.sum(axis=0) > 0]
    assert stats.chi2_contingency(table).pvalue > 1e-3


@pytest.mark.parametrize("n, m, p", [(3, 5, 0.2), (4, 6, 0.4)])
def test_scan_order_is_irrelevant(n, m, p):
    rng = np.random.default_rng(13)
    shuffled = np.bincount([simulate_trial(n, m, p, rng, shuffle=True) for _ in range(6000)], minlength=n + 1)
    assert chi2_pvalue(shuffled, exact_match_distribution(n, m, p)) > 1e-3


# -- expected-match estimates ----------------------------------------------

def test_config_orders_sizes_and_validates():
    c = McConfig(10, 3, 0.1, 5)
    assert (c.n, c.m) == (3, 10)
    with pytest.raises(DomainError):
        McConfig(1, 1, 0.1, 0)
    with pytest.raises(DomainError):
        McConfig(1, 1, -0.1, 10)


def test_zero_probability():
    res = mc_expected_matches(McConfig(50, 80, 0.0, 1000, 1))
    assert res.mean_matches == 0 and res.std_error == 0
    assert res.undefined and res.relative_error is None


def test_two_by_two():
    res = mc_expected_matches(McConfig(2, 2, 0.5, 10**6, 2))
    assert abs(res.mean_matches - 1.3125) < 3 * res.std_error


def test_determinism_and_thread_independence():
    cfg = McConfig(3, 4, 0.3, 2 * mc.BLOCK_TRIALS + 17, 99)
    a = mc_expected_matches(cfg)
    b = mc_expected_matches(cfg, threads=3)
    assert np.array_equal(a.counts, b.counts)
    assert (a.mean_matches, a.std_error) == (b.mean_matches, b.std_error)
    small = McConfig(30, 40, 0.05, 5000, 4)
    assert mc_expected_matches(small) == mc_expected_matches(small)
    assert np.array_equal(mc_expected_matches(small, "reference").counts,
                          mc_expected_matches(small, "reference").counts)


def test_different_seeds_differ():
    a = mc_expected_matches(McConfig(30, 40, 0.05, 5000, 1))
    b = mc_expected_matches(McConfig(30, 40, 0.05, 5000, 2))
    assert not np.array_equal(a.counts, b.counts)


def test_counts_bounded():
    res = mc_expected_matches(McConfig(20, 25, 0.9, 10_000, 3))
    assert len(res.counts) == 21 and res.counts.sum() == 10_000
    assert 0 <= res.mean_matches <= 20


def test_stderr_convergence():
    small = mc_expected_matches(McConfig(10, 30, 0.05, 10_000, 6))
    large = mc_expected_matches(McConfig(10, 30, 0.05, 1_000_000, 7))
    assert 8 <= small.std_error / large.std_error <= 12


@pytest.mark.parametrize("n, m, p", [(1, 1, 0.5), (5, 5, 0.3), (10, 40, 0.02), (25, 25, 0.5), (50, 50, 0.01)])
def test_agreement_with_exact(n, m, p):
    res = mc_expected_matches(McConfig(n, m, p, 200_000, 8))
    assert abs(res.mean_matches - exact_expected_matches(n, m, p)) < 4 * res.std_error


def test_unknown_method():
    with pytest.raises(ValueError):
        mc_expected_matches(McConfig(1, 1, 0.5, 1), method="fast")


# -- grids -----------------------------------------------------------------

def test_grid_zero_probability_rows():
    report = validate_grid([10, 20], [20], [0.0], trials=500)
    assert len(report.cells) == 2
    for c in report.cells:
        assert c.analytic == 0 and c.mc_mean == 0
        assert c.rel_err_mc is None and c.rel_err_exact is None
    assert report.summary()["undefined_cells"] == 2


def test_grid_large_p_degrades():
    cell = validate_grid([2], [2], [0.5], trials=10**6, seed=1).cells[0]
    assert cell.analytic == 1.5 and cell.exact == 1.3125
    assert cell.rel_err_exact == pytest.approx(0.125, abs=1e-15)
    assert cell.rel_err_mc == pytest.approx(0.125, abs=0.002)


def test_grid_skips_n_above_m_and_flags_capacity():
    report = validate_grid([10, 5000], [100, 5000], [1e-4], trials=200)
    assert [(c.n, c.m) for c in report.cells] == [(10, 100), (10, 5000), (5000, 5000)]
    assert report.cells[-1].exact is None


def test_grid_target_stderr():
    report = validate_grid([10, 100], [100], [1e-6, 1e-4], target_rel_stderr=0.01, seed=3)
    assert report.summary()["max_rel_stderr"] < 0.01
    assert all(c.trials >= 1000 for c in report.cells)


def test_grid_argument_checks():
    with pytest.raises(ValueError):
        validate_grid([1], [1], [0.1])
    with pytest.raises(ValueError):
        validate_grid([1], [1], [0.1], trials=10, target_rel_stderr=0.1)
    with pytest.raises(ValueError):
        validate_grid([], [1], [0.1], trials=10)
    with pytest.raises(DomainError):
        validate_grid([1], [1], [2.0], trials=10)


def test_grid_serialization():
    report = validate_grid([2], [2, 3], [0.0, 0.5], trials=1000, seed=1)
    rows = report.to_csv().splitlines()
    assert rows[0] == "n,m,p,trials,analytic,mc_mean,mc_stderr,exact,rel_err_mc,rel_err_exact"
    assert len(rows) == 5
    assert ",,"  in rows[1]  # undefined relative errors are blank
    import json
    summary = json.loads(report.to_json())
    assert summary["cells"] == 4 and summary["undefined_cells"] == 2
    assert summary == report.summary()
