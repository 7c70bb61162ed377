#
# api/family/__init__.py - Exponential dispersion families
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
@brief Exponential dispersion families

The response density has the form

```
pi(y; theta, phi) = exp{phi [y theta - b(theta) + c(y)] + a(y, phi)}
a(y, phi)         = phi a0(y) + a1(phi) + a2(y)
```

with mean mu = b'(theta), variance V(mu) / phi and precision phi common to all observations. Three
families are supported: normal, gamma and inverse normal. All functions are vectorized over numpy arrays.

The family carries no per-instance state, so the enumeration value itself is the family.
'''

import logging
import math

from dataclasses import dataclass
from enum import Enum

import numpy as np

import glmcorr.__config__

from glmcorr.__errors__ import ConvergenceError, DegenerateError, DomainError
from glmcorr.api import special

logger = logging.getLogger(__name__)


class FamilySpec (str, Enum):
    '''
    @brief Response distribution family
    '''
    NORMAL = 'normal'
    GAMMA = 'gamma'
    INVERSE_NORMAL = 'inverse-normal'

    @property
    def positive_mean(self):
        return self is not FamilySpec.NORMAL

    @staticmethod
    def from_name(name):
        '''
        Resolve a family from its name. Common aliases are accepted.
        '''
        key = str(name).strip().lower().replace('_', '-')
        aliases = {'gaussian': 'normal',
                   'inverse-gaussian': 'inverse-normal',
                   'inversenormal': 'inverse-normal',
                   'inverse normal': 'inverse-normal',
                   'ig': 'inverse-normal'}
        key = aliases.get(key, key)
        try:
            return FamilySpec(key)
        except ValueError:
            raise DomainError(f'Unknown family \'{name}\'',
                              'Allowed families are: ' + ', '.join(f.value for f in FamilySpec))


@dataclass(frozen=True)
class PhiDerivs:
    '''
    @brief Function a1 of the precision parameter and its derivatives

    `d2`, `d3`, `d4` are the scaled derivatives d(k) = phi^k a1^(k)(phi) used by the correction factors.
    '''
    phi: float
    a1: float
    a1_1: float
    a1_2: float
    a1_3: float
    a1_4: float
    d2: float
    d3: float
    d4: float


def _first_offender(mask):
    idx = np.flatnonzero(np.atleast_1d(mask))
    return int(idx[0]) if idx.size else None


def check_mean(fam, mu):
    '''
    @brief Validate means against the family mean domain

    @param fam Family
    @param mu  Mean value(s)
    @return Means as float array
    '''
    m = np.asarray(mu, dtype=float)
    bad = ~np.isfinite(m)
    if fam.positive_mean:
        bad = bad | ~(m > 0.0)
    if np.any(bad):
        index = _first_offender(bad)
        raise DomainError(f'Mean outside the domain of the {fam.value} family',
                          f'mu[{index}]={np.atleast_1d(m)[index]!r}', index=index)
    return m


def check_response(fam, y):
    '''
    @brief Validate responses against the family support
    '''
    a = np.asarray(y, dtype=float)
    bad = ~np.isfinite(a)
    if fam.positive_mean:
        bad = bad | ~(a > 0.0)
    if np.any(bad):
        index = _first_offender(bad)
        raise DomainError(f'Response outside the support of the {fam.value} family',
                          f'y[{index}]={np.atleast_1d(a)[index]!r}', index=index)
    return a


def variance_fn(fam, mu):
    '''
    @brief Variance function and its first two derivatives with respect to the mean

    @param fam Family
    @param mu  Mean value(s)
    @return Tuple (V, dV/dmu, d2V/dmu2)
    '''
    m = check_mean(fam, mu)

    if fam is FamilySpec.NORMAL:
        one = np.ones_like(m)
        return one, np.zeros_like(m), np.zeros_like(m)

    if fam is FamilySpec.GAMMA:
        return m ** 2, 2.0 * m, 2.0 * np.ones_like(m)

    return m ** 3, 3.0 * m ** 2, 6.0 * m


def canonical_theta(fam, mu):
    '''
    @brief Canonical parameter theta = q(mu)
    '''
    m = check_mean(fam, mu)

    if fam is FamilySpec.NORMAL:
        return m
    if fam is FamilySpec.GAMMA:
        return -1.0 / m

    return -1.0 / (2.0 * m ** 2)


def _check_theta(fam, theta):
    t = np.asarray(theta, dtype=float)
    bad = ~np.isfinite(t)
    if fam.positive_mean:
        bad = bad | ~(t < 0.0)
    if np.any(bad):
        index = _first_offender(bad)
        raise DomainError(f'Canonical parameter outside the domain of the {fam.value} family',
                          f'theta[{index}]={np.atleast_1d(t)[index]!r}', index=index)
    return t


def b_of_theta(fam, theta):
    '''
    @brief Cumulant function b(theta)

    Its derivative with respect to theta is the mean, see `mean_of_theta`.
    '''
    t = _check_theta(fam, theta)

    if fam is FamilySpec.NORMAL:
        return 0.5 * t ** 2
    if fam is FamilySpec.GAMMA:
        return -np.log(-t)

    return -np.sqrt(-2.0 * t)


def mean_of_theta(fam, theta):
    '''
    @brief Mean mu = db/dtheta as a function of the canonical parameter
    '''
    t = _check_theta(fam, theta)

    if fam is FamilySpec.NORMAL:
        return t
    if fam is FamilySpec.GAMMA:
        return -1.0 / t

    return 1.0 / np.sqrt(-2.0 * t)


def v_of(fam, z):
    '''
    @brief Saturated term v(z) = z q(z) - b(q(z)) of the deviance

    For the gamma family this is -log(z) - 1. This is the value consistent with t(y) = -1 and with the
    usual gamma deviance.
    '''
    a = check_mean(fam, z)

    if fam is FamilySpec.NORMAL:
        return 0.5 * a ** 2
    if fam is FamilySpec.GAMMA:
        return -np.log(a) - 1.0

    return 1.0 / (2.0 * a)


def t_of(fam, y):
    '''
    @brief Term t(y) = v(y) + a0(y) of the precision estimating equation
    '''
    a = np.asarray(y, dtype=float)

    if fam is FamilySpec.GAMMA:
        return -np.ones_like(a)

    return np.zeros_like(a)


def a2_of(fam, y):
    '''
    @brief Normalizing term a2(y) of the density
    '''
    a = check_response(fam, y)

    if fam is FamilySpec.NORMAL:
        return np.full_like(a, -0.5 * math.log(2.0 * math.pi))
    if fam is FamilySpec.GAMMA:
        return -np.log(a)

    return -0.5 * np.log(2.0 * math.pi * a ** 3)


def phi_derivs(fam, phi):
    '''
    @brief Function a1(phi) with its first four derivatives

    Normal and inverse normal families use a1(phi) = log(phi) / 2, the gamma family
    a1(phi) = phi log(phi) - log Gamma(phi).

    @param fam Family
    @param phi Precision parameter, phi > 0
    @return PhiDerivs instance
    '''
    if not (math.isfinite(phi) and phi > 0.0):
        raise DomainError('Precision parameter must be positive and finite', f'phi={phi!r}')

    phi = float(phi)

    if fam is FamilySpec.GAMMA:
        a1 = phi * math.log(phi) - special.log_gamma(phi)
        a1_1 = math.log(phi) + 1.0 - special.digamma(phi)
        a1_2 = 1.0 / phi - special.trigamma(phi)
        a1_3 = -1.0 / phi ** 2 - special.polygamma(2, phi)
        a1_4 = 2.0 / phi ** 3 - special.polygamma(3, phi)
    else:
        a1 = 0.5 * math.log(phi)
        a1_1 = 0.5 / phi
        a1_2 = -0.5 / phi ** 2
        a1_3 = 1.0 / phi ** 3
        a1_4 = -3.0 / phi ** 4

    return PhiDerivs(phi=phi, a1=a1, a1_1=a1_1, a1_2=a1_2, a1_3=a1_3, a1_4=a1_4,
                     d2=phi ** 2 * a1_2, d3=phi ** 3 * a1_3, d4=phi ** 4 * a1_4)


def deviance_components(fam, y, mu_hat):
    '''
    @brief Unit deviances d_l = 2[v(y_l) - v(mu_l) + (mu_l - y_l) q(mu_l)]

    The closed forms of the three families are used, which are algebraically identical to the
    v/q expression and exactly zero for y = mu.
    '''
    a = check_response(fam, y)
    m = check_mean(fam, mu_hat)
    if a.shape != m.shape:
        raise DomainError('Response and mean vectors differ in length', f'{a.shape} != {m.shape}')

    if fam is FamilySpec.NORMAL:
        return (a - m) ** 2
    if fam is FamilySpec.GAMMA:
        return 2.0 * (-np.log(a / m) + (a - m) / m)

    return (a - m) ** 2 / (m ** 2 * a)


def deviance(fam, y, mu_hat):
    '''
    @brief Deviance D_p of a fitted model

    @param fam    Family
    @param y      Response vector
    @param mu_hat Fitted means
    @return Nonnegative deviance
    '''
    return float(np.sum(deviance_components(fam, y, mu_hat)))


def deviance_residuals(fam, y, mu_hat):
    '''
    @brief Deviance component residuals sign(y - mu) sqrt(d_l)
    '''
    d = np.maximum(deviance_components(fam, y, mu_hat), 0.0)
    return np.sign(np.asarray(y, dtype=float) - np.asarray(mu_hat, dtype=float)) * np.sqrt(d)


def pearson_residuals(fam, y, mu_hat, phi):
    '''
    @brief Pearson residuals sqrt(phi) (y - mu) / sqrt(V(mu))
    '''
    V, _, _ = variance_fn(fam, mu_hat)
    return math.sqrt(phi) * (np.asarray(y, dtype=float) - np.asarray(mu_hat, dtype=float)) / np.sqrt(V)


def loglik(fam, y, mu, phi):
    '''
    @brief Total log-likelihood

    Uses the deviance form l = -phi D / 2 + phi sum t(y) + n a1(phi) + sum a2(y), which is the full
    log density of the sample.
    '''
    a = check_response(fam, y)
    n = a.size
    D = deviance(fam, a, mu)
    derivs = phi_derivs(fam, phi)
    return float(-0.5 * phi * D + phi * np.sum(t_of(fam, a)) + n * derivs.a1 + np.sum(a2_of(fam, a)))


def _gamma_phi_start(s):
    return (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)


def _solve_gamma_phi(s):
    '''
    Solve log(phi) - psi(phi) = s by Newton's method, safeguarded by bisection

    The left hand side decreases strictly from +inf to 0, so a bracket is maintained and Newton steps
    leaving it are replaced by bisection steps.
    '''
    phi = _gamma_phi_start(s)
    lo, hi = 0.0, math.inf

    for iteration in range(glmcorr.__config__.phi_max_iter):
        f = math.log(phi) - special.digamma(phi) - s
        if f > 0.0:
            lo = phi
        else:
            hi = phi

        df = 1.0 / phi - special.trigamma(phi)
        step = f / df
        candidate = phi - step

        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * phi
            logger.debug('Precision Newton step left the bracket, bisecting to %g', candidate)

        if abs(candidate - phi) <= glmcorr.__config__.phi_tol * phi:
            return candidate

        phi = candidate

    raise ConvergenceError('Precision estimate did not converge',
                           f'log(phi) - psi(phi) = {s!r} after {glmcorr.__config__.phi_max_iter} iterations', last=phi)


def a1_prime_inverse_equation(fam, deviance, n, t_sum=None):
    '''
    @brief Maximum likelihood estimate of the precision parameter

    Solves a1'(phi) = (D_p / 2 - sum t(y)) / n. Normal and inverse normal families have the closed form
    phi = n / D_p, the gamma family requires solving log(phi) - psi(phi) = D_p / (2n).

    @param fam      Family
    @param deviance Deviance D_p of the fit
    @param n        Number of observations
    @param t_sum    Sum of t(y) over the sample. Defaults to the family value for n observations.
    @return Estimate of phi
    '''
    if n < 1:
        raise DomainError('At least one observation is required', f'n={n!r}')
    if not math.isfinite(deviance) or deviance < 0.0:
        raise DomainError('Deviance must be finite and nonnegative', f'D={deviance!r}')
    if deviance == 0.0:
        raise DegenerateError('Precision is unbounded', 'The deviance of the fit is zero')

    if t_sum is None:
        t_sum = -float(n) if fam is FamilySpec.GAMMA else 0.0

    rhs = (0.5 * deviance - t_sum) / n

    if fam is FamilySpec.GAMMA:
        s = rhs - 1.0
        if not s > 0.0:
            raise DomainError('Gamma precision equation has no solution', f'log(phi) - psi(phi) = {s!r}')
        return _solve_gamma_phi(s)

    return 1.0 / (2.0 * rhs)


def sample_response(fam, mu, phi, rng):
    '''
    @brief Draw responses with mean mu and variance V(mu) / phi

    - normal: N(mu, 1 / phi)
    - gamma: shape phi, scale mu / phi
    - inverse normal: mean mu, shape phi, drawn by the transformation method of Michael, Schucany and
      Haas (one chi-squared(1) variate and one uniform acceptance draw per value)

    @param fam Family
    @param mu  Mean value(s)
    @param phi Precision parameter
    @param rng numpy Generator, the only state which is modified
    @return Draws with the shape of mu
    '''
    m = check_mean(fam, mu)
    if not (math.isfinite(phi) and phi > 0.0):
        raise DomainError('Precision parameter must be positive and finite', f'phi={phi!r}')

    if fam is FamilySpec.NORMAL:
        return rng.normal(m, 1.0 / math.sqrt(phi))

    if fam is FamilySpec.GAMMA:
        return rng.gamma(phi, m / phi)

    nu = rng.standard_normal(np.shape(m))
    w = nu ** 2
    x = m + m ** 2 * w / (2.0 * phi) - m / (2.0 * phi) * np.sqrt(4.0 * m * phi * w + (m * w) ** 2)
    u = rng.uniform(size=np.shape(m))
    result = np.where(u <= m / (m + x), x, m ** 2 / x)
    return float(result) if np.ndim(result) == 0 else result
