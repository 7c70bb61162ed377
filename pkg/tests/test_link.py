#
# test_link.py - Link functions and their derivative chain
#
# (C) 2026 glmcorr developers
#

import math

import numpy as np
import pytest

from glmcorr import DomainError
from glmcorr.api import link as link_api
from glmcorr.api.link import LinkSpec

# Linear predictor ranges inside the domain of every link
ETA_RANGE = {LinkSpec.LOG: (-2.0, 2.0),
             LinkSpec.IDENTITY: (-3.0, 3.0),
             LinkSpec.RECIPROCAL: (0.3, 3.0),
             LinkSpec.RECIPROCAL_SQUARED: (0.3, 3.0)}


class TestLinkSpec:

    @pytest.mark.parametrize('name, expected', [('log', LinkSpec.LOG),
                                                ('inverse', LinkSpec.RECIPROCAL),
                                                ('reciprocal_squared', LinkSpec.RECIPROCAL_SQUARED)])
    def test_from_name(self, name, expected):
        assert LinkSpec.from_name(name) is expected

    def test_unknown(self):
        with pytest.raises(DomainError, match='Unknown link'):
            LinkSpec.from_name('probit')


class TestMaps:

    def test_log_at_zero(self):
        assert link_api.mu_of_eta(LinkSpec.LOG, 0.0) == 1.0

    def test_identity(self):
        assert link_api.mu_of_eta(LinkSpec.IDENTITY, -2.5) == -2.5

    @pytest.mark.parametrize('link', list(LinkSpec))
    def test_round_trip(self, link):
        rng = np.random.default_rng(5)
        eta = rng.uniform(*ETA_RANGE[link], size=100)
        mu = link_api.mu_of_eta(link, eta)
        np.testing.assert_allclose(link_api.eta_of_mu(link, mu), eta, rtol=1e-12, atol=1e-12)

    def test_scalar_in_scalar_out(self):
        assert isinstance(link_api.mu_of_eta(LinkSpec.RECIPROCAL, 2.0), float)

    def test_reciprocal_domain(self):
        with pytest.raises(DomainError) as info:
            link_api.mu_of_eta(LinkSpec.RECIPROCAL, np.array([1.0, 0.0]))
        assert info.value.index == 1

    def test_reciprocal_squared_domain(self):
        with pytest.raises(DomainError):
            link_api.link_chain(LinkSpec.RECIPROCAL_SQUARED, -1.0)

    def test_log_mean_domain(self):
        with pytest.raises(DomainError):
            link_api.eta_of_mu(LinkSpec.LOG, 0.0)


class TestDerivativeChain:

    def test_log(self):
        assert link_api.link_chain(LinkSpec.LOG, 1.0) == pytest.approx((math.e,) * 4, rel=1e-15)

    def test_identity(self):
        assert link_api.link_chain(LinkSpec.IDENTITY, 7.0) == (7.0, 1.0, 0.0, 0.0)

    def test_identity_higher_derivatives_vanish(self):
        _, _, d2, d3 = link_api.link_chain(LinkSpec.IDENTITY, np.linspace(-1.0, 1.0, 5))
        assert np.all(d2 == 0.0) and np.all(d3 == 0.0)

    def test_reciprocal_derivative_is_negative(self):
        _, d1, _, _ = link_api.link_chain(LinkSpec.RECIPROCAL, 2.0)
        assert d1 == -0.25

    @pytest.mark.parametrize('link', list(LinkSpec))
    def test_finite_differences(self, link):
        rng = np.random.default_rng(17)
        h = 1e-5
        for eta in rng.uniform(*ETA_RANGE[link], size=50):
            chain = link_api.link_chain(link, eta)
            lo = link_api.link_chain(link, eta - h)
            hi = link_api.link_chain(link, eta + h)
            for k in range(3):
                numeric = (hi[k] - lo[k]) / (2.0 * h)
                assert numeric == pytest.approx(chain[k + 1], rel=1e-6, abs=1e-9)

    @pytest.mark.parametrize('link', [LinkSpec.LOG, LinkSpec.IDENTITY])
    def test_monotone(self, link):
        _, d1, _, _ = link_api.link_chain(link, np.linspace(*ETA_RANGE[link], 11))
        assert np.all(d1 > 0.0)
