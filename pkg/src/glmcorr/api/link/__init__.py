#
# api/link/__init__.py - Link functions
#
# (C) 2026 glmcorr developers
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# provided that the above copyright notice and the following disclaimer are retained.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED
# WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR
# ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES ARISING IN ANY WAY OUT OF
# THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
#
'''
@brief Link functions

A link d relates the mean to the linear predictor, d(mu) = eta. Besides the two maps the module provides
the first three derivatives of the inverse link, which enter the correction factors.

- log: mu = exp(eta)
- identity: mu = eta
- reciprocal: d(mu) = 1 / mu, so mu = 1 / eta and dmu/deta < 0
- reciprocal squared: d(mu) = 1 / mu^2, so mu = eta^(-1/2), the canonical inverse normal link
'''

from enum import Enum

import numpy as np

from glmcorr.__errors__ import DomainError


class LinkSpec (str, Enum):
    '''
    @brief Link function kind
    '''
    LOG = 'log'
    IDENTITY = 'identity'
    RECIPROCAL = 'reciprocal'
    RECIPROCAL_SQUARED = 'reciprocal-squared'

    @staticmethod
    def from_name(name):
        key = str(name).strip().lower().replace('_', '-')
        aliases = {'inverse': 'reciprocal',
                   'inverse-squared': 'reciprocal-squared',
                   '1/mu': 'reciprocal',
                   '1/mu^2': 'reciprocal-squared'}
        key = aliases.get(key, key)
        try:
            return LinkSpec(key)
        except ValueError:
            raise DomainError(f'Unknown link \'{name}\'',
                              'Allowed links are: ' + ', '.join(k.value for k in LinkSpec))


def _check(link, eta):
    a = np.asarray(eta, dtype=float)
    bad = ~np.isfinite(a)
    if link is LinkSpec.RECIPROCAL:
        bad = bad | (a == 0.0)
    elif link is LinkSpec.RECIPROCAL_SQUARED:
        bad = bad | ~(a > 0.0)

    if np.any(bad):
        index = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise DomainError(f'Linear predictor outside the domain of the {link.value} link',
                          f'eta[{index}]={np.atleast_1d(a)[index]!r}', index=index)
    return a


def _unwrap(result, x):
    return float(result) if np.ndim(x) == 0 else result


def mu_of_eta(link, eta):
    '''
    @brief Inverse link mu = d^-1(eta)
    '''
    a = _check(link, eta)

    if link is LinkSpec.LOG:
        result = np.exp(a)
    elif link is LinkSpec.IDENTITY:
        result = a.copy()
    elif link is LinkSpec.RECIPROCAL:
        result = 1.0 / a
    else:
        result = 1.0 / np.sqrt(a)

    return _unwrap(result, eta)


def eta_of_mu(link, mu):
    '''
    @brief Link eta = d(mu)

    For the log and reciprocal squared links the mean must be positive, for the reciprocal link nonzero.
    '''
    a = np.asarray(mu, dtype=float)
    bad = ~np.isfinite(a)
    if link in (LinkSpec.LOG, LinkSpec.RECIPROCAL_SQUARED):
        bad = bad | ~(a > 0.0)
    elif link is LinkSpec.RECIPROCAL:
        bad = bad | (a == 0.0)

    if np.any(bad):
        index = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise DomainError(f'Mean outside the domain of the {link.value} link',
                          f'mu[{index}]={np.atleast_1d(a)[index]!r}', index=index)

    if link is LinkSpec.LOG:
        result = np.log(a)
    elif link is LinkSpec.IDENTITY:
        result = a.copy()
    elif link is LinkSpec.RECIPROCAL:
        result = 1.0 / a
    else:
        result = 1.0 / a ** 2

    return _unwrap(result, mu)


def link_chain(link, eta):
    '''
    @brief Inverse link and its first three derivatives

    @param link Link function
    @param eta  Linear predictor (scalar or array)
    @return Tuple (mu, dmu/deta, d2mu/deta2, d3mu/deta3)
    '''
    a = _check(link, eta)

    if link is LinkSpec.LOG:
        mu = np.exp(a)
        chain = (mu, mu, mu, mu)

    elif link is LinkSpec.IDENTITY:
        chain = (a.copy(), np.ones_like(a), np.zeros_like(a), np.zeros_like(a))

    elif link is LinkSpec.RECIPROCAL:
        chain = (1.0 / a, -1.0 / a ** 2, 2.0 / a ** 3, -6.0 / a ** 4)

    else:
        chain = (a ** -0.5, -0.5 * a ** -1.5, 0.75 * a ** -2.5, -1.875 * a ** -3.5)

    return tuple(_unwrap(c, eta) for c in chain)
