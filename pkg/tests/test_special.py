#
# test_special.py - Special functions and chi-squared distribution
#
# (C) 2026 glmcorr developers
#

import math

import numpy as np
import pytest

from glmcorr import DomainError
from glmcorr.api import special
from glmcorr.api.special import ChiSqRef

ZETA3 = 1.2020569031595942


class TestLogGamma:

    @pytest.mark.parametrize('x, expected', [(1.0, 0.0), (5.0, math.log(24.0)), (0.5, 0.5 * math.log(math.pi))])
    def test_values(self, x, expected):
        assert special.log_gamma(x) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize('x', [1e-3, 0.7, 3.3, 42.0, 1e6])
    def test_recurrence(self, x):
        assert special.log_gamma(x + 1.0) == pytest.approx(special.log_gamma(x) + math.log(x), rel=1e-12)

    @pytest.mark.parametrize('x', [0.0, -1.0, math.inf, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            special.log_gamma(x)

    def test_vectorized(self):
        x = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(special.log_gamma(x), [0.0, 0.0, math.log(2.0)], atol=1e-15)


class TestPolygamma:

    def test_trigamma_at_one(self):
        assert special.polygamma(1, 1.0) == pytest.approx(math.pi ** 2 / 6.0, rel=1e-12)

    def test_digamma_shift(self):
        assert special.polygamma(0, 2.0) == pytest.approx(special.polygamma(0, 1.0) + 1.0, rel=1e-12)

    def test_tetragamma_at_one(self):
        assert special.polygamma(2, 1.0) == pytest.approx(-2.0 * ZETA3, rel=1e-12)

    @pytest.mark.parametrize('k', [0, 1, 2, 3])
    @pytest.mark.parametrize('x', [0.5, 1.7, 10.0, 100.0])
    def test_recurrence(self, k, x):
        lhs = special.polygamma(k, x + 1.0) - special.polygamma(k, x)
        rhs = (-1.0) ** k * math.factorial(k) / x ** (k + 1)
        assert lhs == pytest.approx(rhs, rel=1e-9)

    @pytest.mark.parametrize('order', [-1, 4, True])
    def test_order_domain(self, order):
        with pytest.raises(DomainError):
            special.polygamma(order, 1.0)

    def test_argument_domain(self):
        with pytest.raises(DomainError):
            special.trigamma(0.0)


class TestChiSquared:

    def test_sf_at_zero(self):
        for df in (1, 2, 7):
            assert special.chisq_sf(0.0, ChiSqRef(df)) == 1.0

    def test_median_of_two_df(self):
        assert special.chisq_quantile(0.5, ChiSqRef(2)) == pytest.approx(2.0 * math.log(2.0), rel=1e-10)

    def test_observed_p_value(self):
        assert special.chisq_sf(7.0659, ChiSqRef(2)) == pytest.approx(0.0292, abs=5e-5)

    @pytest.mark.parametrize('df', range(1, 11))
    @pytest.mark.parametrize('p', [0.01, 0.05, 0.10, 0.5, 0.9, 0.95, 0.99])
    def test_quantile_round_trip(self, df, p):
        ref = ChiSqRef(df)
        assert special.chisq_sf(special.chisq_quantile(p, ref), ref) == pytest.approx(p, abs=1e-8)

    def test_cdf_complements_sf(self):
        ref = ChiSqRef(3)
        x = np.linspace(0.0, 20.0, 41)
        np.testing.assert_allclose(special.chisq_cdf(x, ref) + special.chisq_sf(x, ref), 1.0, rtol=1e-14)

    @pytest.mark.parametrize('df', [0, -2, 1.5, True])
    def test_df_domain(self, df):
        with pytest.raises(DomainError):
            ChiSqRef(df)

    @pytest.mark.parametrize('p', [0.0, 1.0, -0.1, math.nan])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            special.chisq_quantile(p, ChiSqRef(1))

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            special.chisq_sf(-1.0, ChiSqRef(1))


class TestPValue:

    def test_negative_statistic_counts_as_zero(self):
        assert special.p_value(-0.3, 2) == 1.0

    def test_nan_passes_through(self):
        assert math.isnan(special.p_value(math.nan, 1))

    def test_matches_sf(self):
        assert special.p_value(3.84, 1) == special.chisq_sf(3.84, ChiSqRef(1))
