"""Math-kernel contracts: divergence conventions, index solvers against
independent oracles, the regret-floor report, and the CDF/tail identities."""

import math

import mpmath
import numpy as np
import pytest
from scipy.special import betainc

from mpbandit.kl_math import (
    MarginalTieError,
    bernoulli_kl,
    bernoulli_kl_vec,
    beta_cdf_integer,
    chernoff_tail_bound,
    cucb_index,
    kl_ucb_index,
    kl_ucb_index_vec,
    lower_bound_coefficient,
)

mpmath.mp.dps = 50


def mp_kl(p, q):
    p, q = mpmath.mpf(p), mpmath.mpf(q)
    out = mpmath.mpf(0)
    if p > 0:
        out += p * mpmath.log(p / q)
    if p < 1:
        out += (1 - p) * mpmath.log((1 - p) / (1 - q))
    return out


class TestBernoulliKl:
    def test_identity(self):
        assert bernoulli_kl(0.5, 0.5) == 0.0
        assert bernoulli_kl(0.0, 0.0) == 0.0
        assert bernoulli_kl(1.0, 1.0) == 0.0

    def test_zero_convention(self):
        assert bernoulli_kl(0.0, 0.5) == pytest.approx(math.log(2), rel=1e-15)

    def test_half_to_point_six(self):
        # High-precision value frozen from a 50-digit evaluation.
        assert bernoulli_kl(0.5, 0.6) == pytest.approx(0.020410997260127556, rel=1e-13)

    def test_infinite_at_degenerate_q(self):
        assert bernoulli_kl(0.5, 0.0) == math.inf
        assert bernoulli_kl(0.5, 1.0) == math.inf
        assert bernoulli_kl(1.0, 0.0) == math.inf

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bernoulli_kl(-0.1, 0.5)
        with pytest.raises(ValueError):
            bernoulli_kl(0.5, 1.0001)

    def test_pinsker_inequality_on_grid(self):
        grid = np.linspace(0.01, 0.99, 99)
        for p in grid:
            for q in grid:
                assert bernoulli_kl(p, q) >= 2.0 * (p - q) ** 2 - 1e-12

    def test_nonnegative_with_equality_iff_equal(self):
        grid = np.linspace(0.01, 0.99, 25)
        for p in grid:
            for q in grid:
                d = bernoulli_kl(p, q)
                if p == q:
                    assert d == 0.0
                else:
                    assert d > 0.0

    def test_vectorized_agrees_with_scalar(self):
        # Near the diagonal both forms lose relative precision to
        # cancellation, so the comparison needs an absolute floor.
        rng = np.random.default_rng(0)
        p = np.concatenate([[0.0, 1.0, 0.5], rng.random(50)])
        q = np.concatenate([[0.5, 0.5, 0.5], rng.random(50)])
        vec = bernoulli_kl_vec(p, q)
        for i in range(len(p)):
            assert vec[i] == pytest.approx(bernoulli_kl(p[i], q[i]), rel=1e-10, abs=1e-13)


class TestKlUcbIndex:
    def test_zero_budget_returns_mean(self):
        assert kl_ucb_index(0.3, 5, 0.0) == 0.3

    def test_mean_one_is_fixed_point(self):
        assert kl_ucb_index(1.0, 3, 17.0) == 1.0

    def test_closed_form_at_mean_zero(self):
        # d(0, q) = -ln(1 - q), so the index solves 1 - q = t^(-1/n).
        got = kl_ucb_index(0.0, 1, math.log(100))
        assert got == pytest.approx(0.99, abs=1e-8)

    def test_result_feasible_and_above_mean(self):
        for mean in (0.0, 0.2, 0.7, 0.95):
            for n in (1, 7, 100):
                for budget in (0.0, 0.4, 3.0):
                    q = kl_ucb_index(mean, n, budget)
                    assert q >= mean
                    assert n * bernoulli_kl(mean, min(q, 1.0 - 1e-12)) <= budget + 1e-6

    def test_monotone_in_budget_and_count(self):
        budgets = np.linspace(0.0, 5.0, 11)
        vals = [kl_ucb_index(0.4, 10, b) for b in budgets]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        counts = [1, 2, 5, 10, 50, 200]
        vals = [kl_ucb_index(0.4, n, 2.0) for n in counts]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_brute_force_scan_small(self):
        # Downscaled version of the acceptance sweep: 1e5-point scans.
        qs = np.linspace(0.0, 1.0, 100_001)
        for mean in (0.1, 0.5, 0.9):
            for n in (1, 10):
                for budget in (0.2, 1.5):
                    feasible = qs[qs >= mean]
                    ok = n * bernoulli_kl_vec(np.full_like(feasible, mean), feasible) <= budget
                    oracle = feasible[ok].max()
                    assert kl_ucb_index(mean, n, budget) == pytest.approx(oracle, abs=1e-5)

    def test_vectorized_agrees_with_scalar(self):
        # Both solvers sit within their own tolerance of the supremum; a
        # feasibility test that flips inside float rounding can separate
        # them by a few interval widths, hence the 1e-8 slack.
        rng = np.random.default_rng(3)
        means = rng.random(100)
        counts = rng.integers(1, 300, 100)
        for budget in (0.0, 0.7, 4.2):
            vec = kl_ucb_index_vec(means, counts, budget)
            for i in range(100):
                assert vec[i] == pytest.approx(kl_ucb_index(means[i], int(counts[i]), budget), abs=1e-8)


class TestCucbIndex:
    def test_log_one_collapses_to_mean(self):
        assert cucb_index(0.5, 6, 1) == 0.5

    def test_plug_in_values(self):
        assert cucb_index(0.5, 6, math.e**2) == pytest.approx(0.5 + math.sqrt(0.5), rel=1e-12)
        assert cucb_index(0.0, 1, math.e**2) == pytest.approx(math.sqrt(3.0), rel=1e-12)

    def test_not_clipped(self):
        assert cucb_index(0.9, 1, 1000) > 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            cucb_index(0.5, 0, 10)
        with pytest.raises(ValueError):
            cucb_index(0.5, 5, 0.5)


class TestLowerBound:
    def test_scenario1_against_high_precision_oracle(self):
        means = [0.7, 0.6, 0.5, 0.4, 0.3]
        report = lower_bound_coefficient(means, 2)
        assert [t.arm for t in report.per_arm_terms] == [2, 3, 4]
        assert [t.gap for t in report.per_arm_terms] == [0.1, 0.2, 0.3]
        mu_l = mpmath.mpf(0.6)
        total = mpmath.mpf(0)
        for term, mu in zip(report.per_arm_terms, (0.5, 0.4, 0.3)):
            exact = (mu_l - mpmath.mpf(mu)) / mp_kl(mu, 0.6)
            total += exact
            assert abs(term.coefficient - float(exact)) / float(exact) < 1e-9
        assert abs(report.total_coefficient - float(total)) / float(total) < 1e-9
        assert report.value_at(math.e) == pytest.approx(report.total_coefficient)

    def test_single_suboptimal_arm(self):
        report = lower_bound_coefficient([0.9, 0.1], 1)
        assert len(report.per_arm_terms) == 1
        assert report.total_coefficient == pytest.approx(0.8 / bernoulli_kl(0.1, 0.9), rel=1e-12)

    def test_tied_optimal_arms_do_not_contribute(self):
        report = lower_bound_coefficient([0.5, 0.5, 0.3], 2)
        assert [t.arm for t in report.per_arm_terms] == [2]

    def test_marginal_tie_rejected_with_indices(self):
        with pytest.raises(MarginalTieError) as err:
            lower_bound_coefficient([0.5, 0.5, 0.3], 1)
        assert set(err.value.indices) == {0, 1}

    def test_boundary_mean_rejected(self):
        with pytest.raises(ValueError, match="strictly inside"):
            lower_bound_coefficient([0.5, 0.2, 0.0], 1)

    def test_report_invariants(self):
        report = lower_bound_coefficient([0.15, 0.12, 0.10] + [0.05] * 9 + [0.03] * 8, 3)
        assert len(report.per_arm_terms) == 17
        assert all(t.coefficient > 0 for t in report.per_arm_terms)
        total = sum(t.coefficient for t in report.per_arm_terms)
        assert abs(report.total_coefficient - total) <= 1e-12 * abs(total)

    def test_plays_range_validated(self):
        with pytest.raises(ValueError):
            lower_bound_coefficient([0.5, 0.4], 2)


class TestBetaCdfInteger:
    def test_uniform_case(self):
        assert beta_cdf_integer(1, 1, 0.25) == pytest.approx(0.25, rel=1e-14)

    def test_quadratic_case(self):
        for y in np.linspace(0.05, 0.95, 10):
            assert beta_cdf_integer(2, 1, y) == pytest.approx(y**2, rel=1e-12)

    def test_example_agrees_with_beta_side(self):
        assert beta_cdf_integer(3, 7, 0.3) == pytest.approx(float(betainc(3, 7, 0.3)), abs=1e-10)

    def test_identity_on_small_grid(self):
        ys = np.arange(0.05, 1.0, 0.05)
        for a in range(1, 13):
            for b in range(1, 13):
                for y in ys:
                    assert abs(beta_cdf_integer(a, b, y) - float(betainc(a, b, y))) < 1e-10

    def test_edges_and_validation(self):
        assert beta_cdf_integer(4, 2, 0.0) == 0.0
        assert beta_cdf_integer(4, 2, 1.0) == 1.0
        with pytest.raises(ValueError):
            beta_cdf_integer(0, 2, 0.5)
        with pytest.raises(ValueError):
            beta_cdf_integer(1.5, 2, 0.5)

    def test_large_parameters_stay_stable(self):
        val = beta_cdf_integer(5000, 5000, 0.5)
        assert val == pytest.approx(float(betainc(5000, 5000, 0.5)), abs=1e-9)


class TestChernoffTailBound:
    def test_zero_samples_give_one(self):
        assert chernoff_tail_bound(0.5, 0, 0.1) == 1.0

    def test_plug_in_value(self):
        # exp(-100 * d(0.6, 0.5)), frozen from a 50-digit evaluation.
        got = chernoff_tail_bound(0.5, 100, 0.1, tail="upper")
        assert got == pytest.approx(0.133513677251316724, rel=1e-12)

    def test_monotone_nonincreasing_in_n(self):
        vals = [chernoff_tail_bound(0.5, n, 0.1) for n in range(0, 200, 10)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_lower_tail(self):
        got = chernoff_tail_bound(0.5, 50, 0.2, tail="lower")
        assert got == pytest.approx(math.exp(-50 * bernoulli_kl(0.3, 0.5)), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            chernoff_tail_bound(0.5, 10, 0.6, tail="upper")
        with pytest.raises(ValueError):
            chernoff_tail_bound(0.5, 10, 0.5, tail="lower")
        with pytest.raises(ValueError):
            chernoff_tail_bound(0.5, 10, 0.1, tail="sideways")
