#
# api/fit/__init__.py - Maximum likelihood fitting by reweighted least squares
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
@brief Maximum likelihood fitting

The regression parameters are estimated by iteratively reweighted least squares (Fisher scoring) with
the modified dependent variable

```
z = eta - offset + (y - mu) / (dmu/deta)
w = (dmu/deta)^2 / V(mu)
```

Every weighted least squares step is solved by a QR decomposition of W^(1/2) X. The estimate of beta
does not depend on phi, so phi is estimated afterwards from the deviance of the converged fit.

Null restricted fits pin the tested coefficients by moving X1 beta10 into an offset and fitting the
remaining columns only.
'''

import logging
import math
import uuid

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

import glmcorr.__config__

from glmcorr.__errors__ import ConvergenceError, DomainError, SingularDesignError
from glmcorr.__logging__ import RunLogger, log_event
from glmcorr.api import family as fam_api
from glmcorr.api import link as link_api
from glmcorr.api import special
from glmcorr.api.family import FamilySpec
from glmcorr.api.link import LinkSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    '''
    @brief Model matrix with column labels

    The matrix must have full column rank p and more rows than columns.
    '''
    X: np.ndarray
    column_names: tuple = ()

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DomainError('Design must be a two dimensional matrix', f'shape={X.shape}')
        if not np.all(np.isfinite(X)):
            raise DomainError('Design contains non finite values')

        n, p = X.shape
        if p < 1 or p >= n:
            raise SingularDesignError('Design needs more rows than columns', f'n={n}, p={p}')
        if np.linalg.matrix_rank(X) < p:
            raise SingularDesignError('Design is rank deficient', f'rank={np.linalg.matrix_rank(X)}, p={p}')

        names = tuple(self.column_names) if self.column_names else tuple(f'x{i + 1}' for i in range(p))
        if len(names) != p:
            raise DomainError('Number of column names does not match the design', f'{len(names)} != {p}')

        X.setflags(write=False)
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'column_names', names)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def subset(self, indices):
        '''
        Design formed by a subset of the columns, in the given order
        '''
        indices = list(indices)
        return DesignMatrix(self.X[:, indices], tuple(self.column_names[i] for i in indices))

    def __repr__(self):
        return f'DesignMatrix (n={self.n}, p={self.p}, columns={list(self.column_names)})'


@dataclass(frozen=True)
class Hypothesis:
    '''
    @brief Null hypothesis H0: beta1 = beta10

    @param tested_indices Column indices of X forming X1
    @param beta10         Values of the tested coefficients under the null hypothesis
    @param phi_known      Known precision parameter. If set, phi is not estimated.
    '''
    tested_indices: tuple
    beta10: tuple = None
    phi_known: float = None

    def __post_init__(self):
        indices = tuple(int(i) for i in self.tested_indices)
        if not indices:
            raise DomainError('At least one coefficient must be tested')
        if len(set(indices)) != len(indices):
            raise DomainError('Tested indices must be distinct', f'indices={indices}')

        beta10 = (0.0,) * len(indices) if self.beta10 is None else tuple(float(b) for b in self.beta10)
        if len(beta10) != len(indices):
            raise DomainError('Number of null values does not match the tested coefficients',
                              f'{len(beta10)} != {len(indices)}')

        if self.phi_known is not None and not (math.isfinite(self.phi_known) and self.phi_known > 0.0):
            raise DomainError('Known precision parameter must be positive', f'phi={self.phi_known!r}')

        object.__setattr__(self, 'tested_indices', indices)
        object.__setattr__(self, 'beta10', beta10)

    @property
    def q(self):
        return len(self.tested_indices)

    def validate(self, p):
        if self.q > p or min(self.tested_indices) < 0 or max(self.tested_indices) >= p:
            raise DomainError('Tested indices do not fit the design', f'indices={self.tested_indices}, p={p}')

    def nuisance_indices(self, p):
        self.validate(p)
        return tuple(i for i in range(p) if i not in self.tested_indices)

    def partition(self, X):
        '''
        Split a design into the tested block X1 and the nuisance block X2
        '''
        X = X.X if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
        rest = self.nuisance_indices(X.shape[1])
        return X[:, list(self.tested_indices)], X[:, list(rest)]

    def __json__(self):
        return {'tested_indices': list(self.tested_indices),
                'beta10': list(self.beta10),
                'phi_known': self.phi_known}

    @staticmethod
    def from_params(params):
        return Hypothesis(tested_indices=tuple(params['tested_indices']),
                          beta10=tuple(params['beta10']),
                          phi_known=params.get('phi_known'))


@dataclass(frozen=True)
class FitOptions:
    '''
    @brief Numerical settings of a fit. Unset values are taken from `glmcorr.__config__`.
    '''
    tol_deviance: float = None
    tol_score: float = None
    max_iter: int = None
    max_halvings: int = None

    def resolved(self):
        cfg = glmcorr.__config__
        return FitOptions(tol_deviance=cfg.irls_tol_deviance if self.tol_deviance is None else self.tol_deviance,
                          tol_score=cfg.irls_tol_score if self.tol_score is None else self.tol_score,
                          max_iter=cfg.irls_max_iter if self.max_iter is None else self.max_iter,
                          max_halvings=cfg.irls_max_halvings if self.max_halvings is None else self.max_halvings)


@dataclass(frozen=True, eq=False)
class FittedModel:
    '''
    @brief Result of a maximum likelihood fit

    `beta_hat` always has length p. For restricted fits the coefficients listed in `fixed_indices` hold
    their null values. `weights` are the IRLS weights w = (dmu/deta)^2 / V(mu) at the estimate.
    '''
    family: FamilySpec
    link: LinkSpec
    y: np.ndarray
    beta_hat: np.ndarray
    phi_hat: float
    phi_known: bool
    eta: np.ndarray
    mu: np.ndarray
    weights: np.ndarray
    deviance: float
    loglik: float
    iterations: int
    converged: bool
    fixed_indices: tuple = ()
    offset: np.ndarray = field(default=None)

    @property
    def n(self):
        return self.y.size

    @property
    def p(self):
        return self.beta_hat.size

    @property
    def restricted(self):
        return bool(self.fixed_indices)

    def deviance_residuals(self):
        return fam_api.deviance_residuals(self.family, self.y, self.mu)

    def pearson_residuals(self):
        return fam_api.pearson_residuals(self.family, self.y, self.mu, self.phi_hat)

    def __repr__(self):
        return (f'FittedModel (family={self.family.value}, link={self.link.value}, n={self.n}, p={self.p}, '
                f'phi_hat={self.phi_hat:.6g}, deviance={self.deviance:.6g}, converged={self.converged})')

    def __json__(self):
        return {'family': self.family.value,
                'link': self.link.value,
                'y': self.y.tolist(),
                'beta_hat': self.beta_hat.tolist(),
                'phi_hat': self.phi_hat,
                'phi_known': self.phi_known,
                'eta': self.eta.tolist(),
                'mu': self.mu.tolist(),
                'weights': self.weights.tolist(),
                'deviance': self.deviance,
                'loglik': self.loglik,
                'iterations': self.iterations,
                'converged': self.converged,
                'fixed_indices': list(self.fixed_indices),
                'offset': None if self.offset is None else self.offset.tolist()}

    @staticmethod
    def from_params(params):
        offset = params.get('offset')
        return FittedModel(family=FamilySpec(params['family']),
                           link=LinkSpec(params['link']),
                           y=np.asarray(params['y'], dtype=float),
                           beta_hat=np.asarray(params['beta_hat'], dtype=float),
                           phi_hat=float(params['phi_hat']),
                           phi_known=bool(params['phi_known']),
                           eta=np.asarray(params['eta'], dtype=float),
                           mu=np.asarray(params['mu'], dtype=float),
                           weights=np.asarray(params['weights'], dtype=float),
                           deviance=float(params['deviance']),
                           loglik=float(params['loglik']),
                           iterations=int(params['iterations']),
                           converged=bool(params['converged']),
                           fixed_indices=tuple(params.get('fixed_indices', ())),
                           offset=None if offset is None else np.asarray(offset, dtype=float))


@dataclass(frozen=True)
class CoefficientRow:
    '''
    @brief Coefficient estimate with its Wald z statistic and two sided p-value
    '''
    name: str
    estimate: float
    std_error: float
    z: float
    p_value: float

    def __json__(self):
        return {'name': self.name, 'estimate': self.estimate, 'std_error': self.std_error,
                'z': self.z, 'p_value': self.p_value}


def as_matrix(X):
    return X.X if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


def _weights(fam, link, eta):
    mu, d1, _, _ = link_api.link_chain(link, eta)
    mu = np.atleast_1d(mu)
    V, _, _ = fam_api.variance_fn(fam, mu)
    return mu, np.atleast_1d(d1), V


def _wls_solve(X, w, z):
    '''
    Weighted least squares solution by QR decomposition of W^(1/2) X
    '''
    sw = np.sqrt(w)
    Q, R = scipy.linalg.qr(sw[:, None] * X, mode='economic')
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() <= np.finfo(float).eps * max(X.shape) * diag.max():
        raise SingularDesignError('Weighted design is numerically rank deficient',
                                  f'min |R_jj| = {diag.min():.3g}, max |R_jj| = {diag.max():.3g}')
    return scipy.linalg.solve_triangular(R, Q.T @ (sw * z))


def _start_eta(fam, link, y):
    mu0 = y.copy()
    if fam.positive_mean:
        mu0 = np.maximum(mu0, 0.1 * np.mean(y))
    try:
        return np.atleast_1d(link_api.eta_of_mu(link, mu0))
    except DomainError:
        logger.debug('Response not admissible as start value of the %s link, using its mean', link.value)
        return np.full_like(y, link_api.eta_of_mu(link, float(np.mean(y))))


def _valid(fam, link, eta):
    try:
        mu, _, _ = _weights(fam, link, eta)
    except DomainError:
        return None
    return mu


def _irls(X, y, fam, link, offset, options):
    '''
    Fisher scoring iterations. Returns (beta, eta, iterations).
    '''
    n, p = X.shape

    if p == 0:
        return np.zeros(0), offset.copy(), 0

    eta = _start_eta(fam, link, y)
    mu, d1, V = _weights(fam, link, eta)
    beta_old = np.linalg.lstsq(X, eta - offset, rcond=None)[0]
    dev_old = math.inf

    for iteration in range(1, options.max_iter + 1):
        z = eta - offset + (y - mu) / d1
        w = d1 ** 2 / V
        beta = _wls_solve(X, w, z)
        eta = X @ beta + offset

        halvings = 0
        mu = _valid(fam, link, eta)
        dev = fam_api.deviance(fam, y, mu) if mu is not None else math.nan
        while mu is None or not math.isfinite(dev):
            if halvings >= options.max_halvings:
                raise ConvergenceError('Mean left the domain of the family',
                                       f'{halvings} step halvings in iteration {iteration} did not help', last=beta)
            halvings += 1
            beta = 0.5 * (beta + beta_old)
            eta = X @ beta + offset
            mu = _valid(fam, link, eta)
            dev = fam_api.deviance(fam, y, mu) if mu is not None else math.nan

        if halvings:
            logger.warning('IRLS iteration %d needed %d step halvings', iteration, halvings)

        mu, d1, V = _weights(fam, link, eta)
        score = X.T @ (d1 / V * (y - mu))
        scale = max(1.0, float(np.max(np.abs(X.T @ (np.abs(d1 / V * y))))))

        logger.debug('IRLS iteration %d: deviance=%.15g, |score|=%.3g', iteration, dev, np.max(np.abs(score)))

        if (abs(dev - dev_old) <= options.tol_deviance * (abs(dev) + 0.1)
                and np.max(np.abs(score)) <= options.tol_score * scale):
            return beta, eta, iteration

        beta_old = beta
        dev_old = dev

    raise ConvergenceError('Reweighted least squares did not converge',
                           f'{options.max_iter} iterations, last deviance change {abs(dev - dev_old):.3g}', last=beta)


def _finish(X, y, fam, link, beta_free, eta, iterations, free_indices, fixed_indices, fixed_values,
            offset, phi_known):
    n, p = X.shape
    mu, d1, V = _weights(fam, link, eta)
    D = fam_api.deviance(fam, y, mu)

    if phi_known is not None:
        phi = float(phi_known)
    else:
        phi = fam_api.a1_prime_inverse_equation(fam, D, n, float(np.sum(fam_api.t_of(fam, y))))

    beta = np.empty(p)
    beta[list(free_indices)] = beta_free
    beta[list(fixed_indices)] = fixed_values

    fit = FittedModel(family=fam, link=link, y=y, beta_hat=beta, phi_hat=phi, phi_known=phi_known is not None,
                      eta=eta, mu=mu, weights=d1 ** 2 / V, deviance=D, loglik=fam_api.loglik(fam, y, mu, phi),
                      iterations=iterations, converged=True, fixed_indices=tuple(fixed_indices), offset=offset)

    log_event(RunLogger.EventType.FIT, uuid.uuid4(), repr(fit))
    return fit


def fit_irls(X, y, fam, link, options=None, phi_known=None, offset=None):
    '''
    @brief Unrestricted maximum likelihood fit

    @param X         Design (DesignMatrix or n x p matrix of full column rank)
    @param y         Response vector in the support of the family
    @param fam       Family
    @param link      Link
    @param options   FitOptions, defaults from the global configuration
    @param phi_known Known precision parameter. If given, phi is not estimated.
    @param offset    Optional known part of the linear predictor
    @return FittedModel
    '''
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix(X)

    Xm = X.X
    y = fam_api.check_response(fam, np.ravel(y))
    if y.size != X.n:
        raise DomainError('Response and design differ in the number of observations', f'{y.size} != {X.n}')

    offset = np.zeros(X.n) if offset is None else np.asarray(offset, dtype=float)
    options = (options or FitOptions()).resolved()

    beta, eta, iterations = _irls(Xm, y, fam, link, offset, options)
    return _finish(Xm, y, fam, link, beta, eta, iterations, tuple(range(X.p)), (), [], offset, phi_known)


def fit_restricted(X, y, fam, link, hyp, options=None):
    '''
    @brief Maximum likelihood fit under the null hypothesis

    The tested coefficients are fixed at `hyp.beta10` by the offset X1 beta10 while the nuisance
    coefficients are fitted over X2. If every coefficient is tested only phi is estimated.

    @param X    Design
    @param y    Response vector
    @param fam  Family
    @param link Link
    @param hyp  Hypothesis
    @return FittedModel with `fixed_indices` set to the tested indices
    '''
    Xm = as_matrix(X)
    n, p = Xm.shape
    hyp.validate(p)

    y = fam_api.check_response(fam, np.ravel(y))
    if y.size != n:
        raise DomainError('Response and design differ in the number of observations', f'{y.size} != {n}')

    X1, X2 = hyp.partition(Xm)
    offset = X1 @ np.asarray(hyp.beta10)
    options = (options or FitOptions()).resolved()

    if X2.shape[1] and np.linalg.matrix_rank(X2) < X2.shape[1]:
        raise SingularDesignError('Nuisance design is rank deficient')

    beta2, eta, iterations = _irls(X2, y, fam, link, offset, options)
    if X2.shape[1] == 0 and _valid(fam, link, eta) is None:
        raise DomainError('Null values give means outside the domain of the family',
                          f'beta10={list(hyp.beta10)}')

    return _finish(Xm, y, fam, link, beta2, eta, iterations, hyp.nuisance_indices(p), hyp.tested_indices,
                   hyp.beta10, offset, hyp.phi_known)


def information_inverse(fit, X):
    '''
    @brief Asymptotic covariance (phi X^T W X)^-1 of the regression estimate
    '''
    Xm = as_matrix(X)
    sw = np.sqrt(fit.weights)
    _, R = scipy.linalg.qr(sw[:, None] * Xm, mode='economic')
    diag = np.abs(np.diag(R))
    if diag.min() <= np.finfo(float).eps * max(Xm.shape) * diag.max():
        raise SingularDesignError('Information matrix is singular')
    Rinv = scipy.linalg.solve_triangular(R, np.eye(R.shape[0]))
    return Rinv @ Rinv.T / fit.phi_hat


def standard_errors(fit, fam, X):
    '''
    @brief Asymptotic standard errors, square roots of diag{(phi X^T W X)^-1}
    '''
    if fam is not fit.family:
        raise DomainError('Family does not match the fit', f'{fam.value} != {fit.family.value}')
    return np.sqrt(np.diag(information_inverse(fit, X)))


def se_phi(fit, fam, n):
    '''
    @brief Asymptotic standard error of the precision estimate, 1 / sqrt(-n a1''(phi))
    '''
    if fit.phi_known:
        raise DomainError('Precision parameter is known, no standard error available')
    derivs = fam_api.phi_derivs(fam, fit.phi_hat)
    return 1.0 / math.sqrt(-n * derivs.a1_2)


def coefficient_table(fit, X):
    '''
    @brief Estimates, standard errors, z statistics and two sided p-values of all coefficients
    '''
    names = X.column_names if isinstance(X, DesignMatrix) else tuple(f'x{i + 1}' for i in range(fit.p))
    se = standard_errors(fit, fit.family, X)

    rows = []
    for name, estimate, s in zip(names, fit.beta_hat, se):
        z = float(estimate / s)
        rows.append(CoefficientRow(name=name, estimate=float(estimate), std_error=float(s), z=z,
                                   p_value=special.p_value(z ** 2, 1)))
    return rows
