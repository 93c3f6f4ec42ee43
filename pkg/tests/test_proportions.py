from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jlparadox import proportions as pr
from jlparadox.numcore import DomainError


def factorial_odds(x, y, x2, y2):
    f = math.factorial
    num = f(x + x2) * f(y + y2) * f(x + y + 1) * f(x2 + y2 + 1)
    den = f(x) * f(y) * f(x2) * f(y2) * f(x + x2 + y + y2 + 1)
    return Fraction(num, den)


class TestCounts:
    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            pr.TwoProportionCounts(-1, 2, 3, 4)

    def test_empty_sample_rejected(self):
        with pytest.raises(DomainError):
            pr.TwoProportionCounts(0, 0, 3, 4)

    def test_binomial_outcome_bounds(self):
        with pytest.raises(DomainError):
            pr.BinomialOutcome(10, 11)
        with pytest.raises(DomainError):
            pr.BinomialOutcome(10, 5, 1.0)


class TestExactOdds:
    def test_smallest_case(self):
        assert pr.exact_two_proportion_odds(pr.TwoProportionCounts(1, 0, 0, 1)).value == pytest.approx(4 / 6)

    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
    def test_against_integer_factorials(self, x, y, x2, y2):
        if x + y == 0 or x2 + y2 == 0:
            return
        got = pr.exact_two_proportion_odds(pr.TwoProportionCounts(x, y, x2, y2))
        assert got.orientation == "01"
        assert got.log_value == pytest.approx(math.log(factorial_odds(x, y, x2, y2)), abs=1e-9)

    @given(st.integers(0, 500), st.integers(1, 500), st.integers(0, 500), st.integers(1, 500))
    def test_sample_swap_symmetry(self, x, y, x2, y2):
        a = pr.exact_two_proportion_odds(pr.TwoProportionCounts(x, y, x2, y2)).log_value
        b = pr.exact_two_proportion_odds(pr.TwoProportionCounts(x2, y2, x, y)).log_value
        assert a == pytest.approx(b, abs=1e-9)

    def test_balanced_40_near_table_value(self):
        value = pr.exact_two_proportion_odds(pr.TwoProportionCounts(20, 20, 20, 20)).value
        assert abs(value - 3.57) <= 0.05 * 3.57

    def test_huge_counts_finite(self):
        r = pr.exact_two_proportion_odds(pr.TwoProportionCounts(10 ** 7, 10 ** 7, 10 ** 7, 10 ** 7))
        assert math.isfinite(r.log_value)

    @pytest.mark.parametrize("n", [4, 5, 10, 50, 301])
    def test_identical_samples_favour_null(self, n):
        for s in range(0, n + 1, max(1, n // 7)):
            assert pr.exact_two_proportion_odds(pr.TwoProportionCounts(s, n - s, s, n - s)).value > 1


class TestApproxOdds:
    def test_table_entries(self):
        assert pr.approx_two_proportion_odds(pr.TwoProportionCounts(20, 20, 20, 20)).value == pytest.approx(
            math.sqrt(80 / (2 * math.pi)))
        assert round(pr.approx_two_proportion_odds(pr.TwoProportionCounts(500, 500, 500, 500)).value, 1) == 17.8

    def test_equal_ratios_leave_outside_factor(self):
        c = pr.TwoProportionCounts(30, 10, 60, 20)
        total = 120
        outside = math.sqrt(total * 40 * 80 / (2 * math.pi * 90 * 30))
        assert pr.approx_two_proportion_odds(c).value == pytest.approx(outside, rel=1e-12)

    def test_small_samples_warn_but_return(self):
        r = pr.approx_two_proportion_odds(pr.TwoProportionCounts(3, 4, 5, 2))
        assert r.warnings and math.isfinite(r.log_value)
        assert not pr.approx_two_proportion_odds(pr.TwoProportionCounts(3, 4, 5, 2), min_sample=5).warnings

    @given(st.sampled_from([200, 400, 1000, 5000]), st.floats(0.0, 1.0))
    @settings(max_examples=40)
    def test_agrees_with_exact_inside_critical_region(self, size, frac):
        # x = y, x' + y' = x + y and x' - y' no larger than the critical difference
        half = size // 2
        k = int(frac * pr.critical_difference(size) / 2)
        c = pr.TwoProportionCounts(half, half, half + k, half - k)
        diff = pr.exact_two_proportion_odds(c).log_value - pr.approx_two_proportion_odds(c).log_value
        assert abs(diff) <= 0.05


class TestTable1:
    def test_first_row(self):
        row = pr.jeffreys1935_table([40])[0]
        assert round(row.max_odds, 2) == 3.57
        assert round(row.critical_difference, 1) == 14.3
        assert round(row.ratio, 2) == 2.26

    def test_last_row(self):
        row = pr.jeffreys1935_table([100_000])[0]
        assert round(row.max_odds) == 178
        assert abs(row.critical_difference - 1440) <= 0.15
        assert abs(row.ratio - 4.57) <= 0.02

    def test_closed_form_at_40(self):
        # the leading-order odds equal 1 where d^2 = 4N ln sqrt(2N / 2 pi)
        d = math.sqrt(160 * math.log(math.sqrt(80 / (2 * math.pi))))
        assert pr.critical_difference(40) == pytest.approx(d, abs=1e-8)

    def test_other_methods_solve_their_own_equation(self):
        for method, fn in (("full", pr.approx_two_proportion_odds), ("exact", pr.exact_two_proportion_odds)):
            d = pr.critical_difference(1000, method)
            c = pr.TwoProportionCounts(500, 500, 500 + d / 2, 500 - d / 2)
            assert fn(c).log_value == pytest.approx(0.0, abs=1e-8)

    def test_monotone_columns(self):
        rows = pr.jeffreys1935_table()
        for a, b in zip(rows, rows[1:]):
            assert b.max_odds > a.max_odds
            assert b.ratio > a.ratio

    def test_odd_size_rejected(self):
        with pytest.raises(DomainError):
            pr.jeffreys1935_table([41])

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            pr.critical_difference(40, "series")


def direct_two_sided_p(n, s, theta):
    pmf = [math.comb(n, k) * Fraction(theta) ** k * (1 - Fraction(theta)) ** (n - k) for k in range(n + 1)]
    lower, upper = sum(pmf[: s + 1]), sum(pmf[s:])
    return min(1.0, float(2 * min(lower, upper)))


class TestBinomial:
    @given(st.integers(1, 60), st.data(), st.sampled_from([0.5, 0.3, 0.9]))
    @settings(max_examples=60)
    def test_against_direct_sum(self, n, data, theta):
        s = data.draw(st.integers(0, n))
        got = pr.binomial_two_sided_p(pr.BinomialOutcome(n, s, theta))
        assert got == pytest.approx(direct_two_sided_p(n, s, Fraction(theta).limit_denominator(10)), abs=1e-12)

    def test_central_outcome(self):
        assert pr.binomial_two_sided_p(pr.BinomialOutcome(10, 5)) == 1.0

    def test_quoted_values(self):
        assert 0.0095 < pr.binomial_two_sided_p(pr.BinomialOutcome(16700, 8517)) < 0.01
        assert pr.binomial_two_sided_p(pr.BinomialOutcome(200, 120)) == pytest.approx(0.006, abs=0.0005)

    def test_decreasing_away_from_null(self):
        ps = [pr.binomial_two_sided_p(pr.BinomialOutcome(500, 250 + k)) for k in range(0, 60, 3)]
        assert all(b < a for a, b in zip(ps, ps[1:]))


class TestGood:
    def test_simplissimus(self):
        res = pr.simplissimus_construct(0.07, 0.01)
        assert abs(res.n - 16700) <= 100
        assert round(res.proportion, 2) == 0.51
        assert res.p_value <= 0.01
        # independent log-likelihood oracle
        ll = lambda th: res.s * math.log(th) + (res.n - res.s) * math.log(1 - th)
        assert ll(0.5) > ll(0.57)
        assert res.log_likelihood_ratio == pytest.approx(ll(0.5) - ll(0.57), rel=1e-12)

    def test_simplissimus_is_minimal(self):
        res = pr.simplissimus_construct(0.07, 0.01)
        frac = 0.5 + 0.07 / 7
        for n in range(res.n - 200, res.n):
            s = math.floor(n * frac + 0.5)
            assert pr.binomial_two_sided_p(pr.BinomialOutcome(n, s)) > 0.01

    def test_large_epsilon_small_n(self):
        res = pr.simplissimus_construct(0.49, 0.01)
        assert res.n < pr.simplissimus_construct(0.07, 0.01).n / 10

    def test_budget(self):
        from jlparadox.numcore import SearchBudgetError
        with pytest.raises(SearchBudgetError):
            pr.simplissimus_construct(0.07, 0.01, max_n=1000)

    def test_bag_comparisons(self):
        big = pr.bag_likelihood_comparison(pr.BinomialOutcome(19000, 9690), [0.6])[0]
        small = pr.bag_likelihood_comparison(pr.BinomialOutcome(200, 120), [0.6])[0]
        assert big > 100
        assert small < 0
        assert small == pytest.approx(120 * math.log(0.5 / 0.6) + 80 * math.log(0.5 / 0.4), rel=1e-12)
        assert pr.bag_likelihood_comparison(pr.BinomialOutcome(20, 3), [0.5]) == [0.0]

    @pytest.mark.parametrize("n,s", [(200, 120), (780, 429), (19000, 9690)])
    def test_bag_p_values(self, n, s):
        assert 0.004 <= pr.binomial_two_sided_p(pr.BinomialOutcome(n, s)) <= 0.008
