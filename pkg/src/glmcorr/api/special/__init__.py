#
# api/special/__init__.py - Scalar special functions
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
@brief Special functions

Log-gamma, polygamma functions of order 0 to 3 and the chi-squared distribution. The functions accept
scalars or numpy arrays. All of them are stateless and can be used from any thread.
'''

import math

from dataclasses import dataclass

import numpy as np
import scipy.special

from glmcorr.__errors__ import DomainError


@dataclass(frozen=True)
class ChiSqRef:
    '''
    @brief Reference chi-squared distribution

    @param df Degrees of freedom, a positive integer
    '''
    df: int

    def __post_init__(self):
        if isinstance(self.df, bool) or int(self.df) != self.df or self.df < 1:
            raise DomainError('Degrees of freedom must be a positive integer', f'df={self.df!r}')


def _positive(x, name):
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
        raise DomainError(f'{name} must be positive and finite', f'{name}={x!r}')
    return a


def _unwrap(result, x):
    return float(result) if np.ndim(x) == 0 else result


def log_gamma(x):
    '''
    @brief Logarithm of the gamma function

    @param x Positive argument (scalar or array)
    @return log(Gamma(x))
    '''
    a = _positive(x, 'x')
    return _unwrap(scipy.special.gammaln(a), x)


def polygamma(order, x):
    '''
    @brief Polygamma function of order 0 (digamma) to 3

    @param order Derivative order of the digamma function, 0..3
    @param x     Positive argument (scalar or array)
    @return psi^(order)(x)
    '''
    if isinstance(order, bool) or order not in (0, 1, 2, 3):
        raise DomainError('Polygamma order must be in 0..3', f'order={order!r}')

    a = _positive(x, 'x')
    if order == 0:
        return _unwrap(scipy.special.digamma(a), x)

    return _unwrap(scipy.special.polygamma(order, a), x)


def digamma(x):
    return polygamma(0, x)


def trigamma(x):
    return polygamma(1, x)


def chisq_sf(x, ref):
    '''
    @brief Upper tail probability of the chi-squared distribution

    The value is the regularized upper incomplete gamma function Q(df/2, x/2).

    @param x   Nonnegative quantile (scalar or array)
    @param ref Reference distribution
    @return P(X > x)
    '''
    a = np.asarray(x, dtype=float)
    if np.any(np.isnan(a)) or np.any(a < 0.0):
        raise DomainError('Chi-squared argument must be nonnegative', f'x={x!r}')

    return _unwrap(scipy.special.gammaincc(0.5 * ref.df, 0.5 * a), x)


def chisq_cdf(x, ref):
    a = np.asarray(x, dtype=float)
    if np.any(np.isnan(a)) or np.any(a < 0.0):
        raise DomainError('Chi-squared argument must be nonnegative', f'x={x!r}')

    return _unwrap(scipy.special.gammainc(0.5 * ref.df, 0.5 * a), x)


def chisq_quantile(p, ref):
    '''
    @brief Upper tail quantile of the chi-squared distribution

    This is the inverse of `chisq_sf`: the returned value x satisfies chisq_sf(x, ref) = p. The critical
    value of a test at level alpha is `chisq_quantile(alpha, ref)`.

    @param p   Upper tail probability, 0 < p < 1
    @param ref Reference distribution
    @return Quantile x
    '''
    a = np.asarray(p, dtype=float)
    if np.any(~(a > 0.0)) or np.any(~(a < 1.0)):
        raise DomainError('Probability must lie strictly between 0 and 1', f'p={p!r}')

    return _unwrap(2.0 * scipy.special.gammainccinv(0.5 * ref.df, a), p)


def p_value(statistic, df):
    '''
    @brief Chi-squared p-value of a test statistic

    Negative statistics can occur for corrected statistics far in the tail. They are treated as zero,
    so the p-value is 1 in that case.

    @param statistic Observed statistic
    @param df        Degrees of freedom
    @return Upper tail probability of max(statistic, 0)
    '''
    if math.isnan(statistic):
        return math.nan

    return chisq_sf(max(float(statistic), 0.0), ChiSqRef(df))
