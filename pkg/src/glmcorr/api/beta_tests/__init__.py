#
# api/beta_tests/__init__.py - Tests on the regression parameters
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
@brief Tests of H0: beta1 = beta10

Computes the likelihood ratio, Wald, score and gradient statistics and the corrected versions

```
S*_LR = S_LR / (1 + a_LR)
S*_R  = S_R [1 - (c_R + b_R S_R + a_R S_R^2)]
S*_T  = S_T [1 - (c_T + b_T S_T + a_T S_T^2)]
```

All correction quantities are evaluated at the restricted estimates (beta10, beta2~, phi~). Every
statistic is referred to the chi-squared distribution with q degrees of freedom.
'''

import logging
import math
import uuid

from dataclasses import dataclass, field

import numpy as np

from glmcorr.__common__ import CorrectionKind, Statistic
from glmcorr.__errors__ import DegenerateError, FitMismatchError, SingularDesignError
from glmcorr.__logging__ import RunLogger, log_event
from glmcorr.api import family as fam_api
from glmcorr.api import fit as fit_api
from glmcorr.api import link as link_api
from glmcorr.api import special
from glmcorr.api.geometry import build_zbundle, lambda_diagonals

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrectionTerms:
    '''
    @brief Quantities of one Bartlett or Bartlett-type correction

    For the likelihood ratio correction only `A1` (the regression part), `A1_bphi` and `a` (= a_LR)
    are used. For score and gradient corrections `a`, `b`, `c` are the coefficients of the polynomial
    factor 1 - (c + b S + a S^2).
    '''
    kind: CorrectionKind
    A1: float
    A2: float = 0.0
    A3: float = 0.0
    A1_bphi: float = 0.0
    A2_bphi: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def apply(self, statistic):
        if self.kind is CorrectionKind.LR:
            return statistic / (1.0 + self.a)
        return statistic * (1.0 - (self.c + self.b * statistic + self.a * statistic ** 2))

    def __json__(self):
        return {'kind': self.kind.value, 'A1': self.A1, 'A2': self.A2, 'A3': self.A3,
                'A1_bphi': self.A1_bphi, 'A2_bphi': self.A2_bphi, 'a': self.a, 'b': self.b, 'c': self.c}

    @staticmethod
    def from_params(params):
        return CorrectionTerms(kind=CorrectionKind(params['kind']),
                               **{k: float(params[k]) for k in ('A1', 'A2', 'A3', 'A1_bphi', 'A2_bphi', 'a', 'b', 'c')})


@dataclass(frozen=True)
class StatisticRecord:
    '''
    @brief Value and chi-squared p-value of a single statistic

    `flagged` marks a corrected statistic which came out negative. Its p-value is computed from zero.
    '''
    name: Statistic
    value: float
    df: int
    p_value: float
    correction: CorrectionTerms = None
    flagged: bool = False

    def __json__(self):
        return {'name': self.name.value, 'value': self.value, 'df': self.df, 'p_value': self.p_value,
                'correction': self.correction, 'flagged': self.flagged}

    @staticmethod
    def from_params(params):
        correction = params.get('correction')
        return StatisticRecord(name=Statistic(params['name']), value=float(params['value']), df=int(params['df']),
                               p_value=float(params['p_value']),
                               correction=None if correction is None else CorrectionTerms.from_params(correction),
                               flagged=bool(params.get('flagged', False)))


@dataclass(frozen=True)
class TestReport:
    '''
    @brief Collection of test statistics for one hypothesis

    `hypothesis` is a short text like 'beta[3] = 0, beta[4] = 0' or 'phi = 30'.
    '''
    __test__ = False

    hypothesis: str
    records: tuple = field(default_factory=tuple)

    def __getitem__(self, name):
        name = Statistic(name)
        for record in self.records:
            if record.name is name:
                return record
        raise KeyError(name.value)

    def __contains__(self, name):
        return any(r.name is Statistic(name) for r in self.records)

    def values(self):
        return {r.name: r.value for r in self.records}

    def p_values(self):
        return {r.name: r.p_value for r in self.records}

    def __json__(self):
        return {'hypothesis': self.hypothesis, 'records': list(self.records)}

    @staticmethod
    def from_params(params):
        return TestReport(hypothesis=params['hypothesis'],
                          records=tuple(StatisticRecord.from_params(r) for r in params['records']))


def make_record(name, value, df, correction=None):
    flagged = bool(name.corrected and value < 0.0)
    if flagged:
        logger.warning('%s is negative (%.6g), p-value computed from zero', name.value, value)
    return StatisticRecord(name=name, value=float(value), df=df, p_value=special.p_value(value, df),
                           correction=correction, flagged=flagged)


def _check_pair(unres, res, hyp, fam, link, X):
    Xm = fit_api.as_matrix(X)

    if unres.restricted:
        raise FitMismatchError('First fit must be the unrestricted one')
    if tuple(res.fixed_indices) != tuple(hyp.tested_indices):
        raise FitMismatchError('Restricted fit does not belong to the hypothesis',
                               f'fixed={list(res.fixed_indices)}, tested={list(hyp.tested_indices)}')
    if not np.array_equal(res.beta_hat[list(hyp.tested_indices)], np.asarray(hyp.beta10)):
        raise FitMismatchError('Restricted fit does not hold the null values')
    if unres.y.shape != res.y.shape or not np.array_equal(unres.y, res.y):
        raise FitMismatchError('Fits belong to different responses')
    if unres.family is not fam or res.family is not fam or unres.link is not link or res.link is not link:
        raise FitMismatchError('Fits belong to a different family or link')
    if Xm.shape != (unres.n, unres.p) or unres.p != res.p:
        raise FitMismatchError('Fits do not match the design', f'design shape={Xm.shape}')
    if unres.phi_known != res.phi_known:
        raise FitMismatchError('Precision parameter is known in one fit only')

    return Xm


def _r_information(X1, X2, weights):
    '''
    R^T W R with R = X1 - X2 (X2^T W X2)^-1 X2^T W X1
    '''
    sw = np.sqrt(weights)
    if X2.shape[1]:
        A = np.linalg.lstsq(sw[:, None] * X2, sw[:, None] * X1, rcond=None)[0]
        R = X1 - X2 @ A
    else:
        R = X1
    Rw = sw[:, None] * R
    return Rw.T @ Rw


def classical_statistics(unres, res, hyp, fam, link, X):
    '''
    @brief Likelihood ratio, Wald, score and gradient statistics

    @param unres Unrestricted fit
    @param res   Restricted fit of the same data under `hyp`
    @param hyp   Hypothesis
    @param fam   Family
    @param link  Link
    @param X     Design
    @return Dictionary Statistic -> value for S_LR, S_W, S_R, S_T
    '''
    Xm = _check_pair(unres, res, hyp, fam, link, X)
    X1, X2 = hyp.partition(Xm)
    displacement = unres.beta_hat[list(hyp.tested_indices)] - np.asarray(hyp.beta10)

    S_LR = max(2.0 * (unres.loglik - res.loglik), 0.0)

    S_W = unres.phi_hat * float(displacement @ _r_information(X1, X2, unres.weights) @ displacement)

    # Restricted score block s~^T W~^(1/2) X1, with W^(1/2) = diag{(dmu/deta) / V^(1/2)}
    _, d1, _, _ = link_api.link_chain(link, res.eta)
    V, _, _ = fam_api.variance_fn(fam, res.mu)
    s = math.sqrt(res.phi_hat) * (res.y - res.mu) / np.sqrt(V)
    u = (np.atleast_1d(d1) / np.sqrt(V) * s) @ X1

    try:
        S_R = float(u @ np.linalg.solve(_r_information(X1, X2, res.weights), u))
    except np.linalg.LinAlgError as e:
        raise SingularDesignError('Restricted information of the tested coefficients is singular', str(e))
    S_T = math.sqrt(res.phi_hat) * float(u @ displacement)

    return {Statistic.LR: S_LR, Statistic.WALD: S_W, Statistic.SCORE: S_R, Statistic.GRADIENT: S_T}



def gradient_identity_check(unres, res, hyp, X):
    '''
    @brief Gradient statistic as restricted score times estimator displacement

    Evaluates U~_beta1^T (beta1^ - beta10) with U_beta1 = phi X1^T diag{(dmu/deta) / V} (y - mu) at the
    restricted fit. This is an independent route to S_T.
    '''
    X1, _ = hyp.partition(fit_api.as_matrix(X))
    _, d1, _, _ = link_api.link_chain(res.link, res.eta)
    V, _, _ = fam_api.variance_fn(res.family, res.mu)

    score = res.phi_hat * X1.T @ (np.atleast_1d(d1) / V * (res.y - res.mu))
    return float(score @ (unres.beta_hat[list(hyp.tested_indices)] - np.asarray(hyp.beta10)))


def _outer(u, M, v):
    return float(u @ M @ v)


def lr_regression_term(bundle, lam, phi):
    '''
    @brief Regression part of A_LR
    '''
    Z, Z2, zd, z2d = bundle.Z, bundle.Z2, bundle.zd, bundle.z2d
    f, g = lam.f, lam.g
    Z3 = bundle.power('Z', 3) - bundle.power('Z2', 3)
    ZdZZd = zd[:, None] * Z * zd[None, :] - z2d[:, None] * Z2 * z2d[None, :]

    value = (-4.0 * _outer(g, Z3, f + g)
             + 3.0 * float(np.sum(lam.m * (zd ** 2 - z2d ** 2)))
             + _outer(f, 2.0 * Z3 + 3.0 * ZdZZd, f))
    return value / phi


def score_terms(bundle, lam, phi):
    '''
    @brief Regression parts A_R1, A_R2, A_R3 of the score correction
    '''
    Z2, z2d, P, pd = bundle.Z2, bundle.z2d, bundle.P, bundle.pd
    f, g, fg = lam.f, lam.g, lam.f - lam.g

    A1 = (3.0 * _outer(f * z2d, P, z2d * f)
          + 6.0 * _outer(f * z2d, Z2, pd * fg)
          - 6.0 * _outer(f, bundle.power('Z2', 2) * P, 2.0 * g - f)
          - 6.0 * float(np.sum(lam.h * pd * z2d)))

    A2 = (-3.0 * _outer(fg * pd, Z2, pd * fg)
          - 6.0 * _outer(f * z2d, P, pd * fg)
          - 6.0 * _outer(fg, bundle.power('P', 2) * Z2, fg)
          + 3.0 * float(np.sum(lam.b * pd ** 2)))

    A3 = (3.0 * _outer(fg * pd, P, pd * fg)
          + 2.0 * _outer(fg, bundle.power('P', 3), fg))

    return A1 / phi, A2 / phi, A3 / phi


def gradient_terms(bundle, lam, phi):
    '''
    @brief Regression parts A_T1, A_T2, A_T3 of the gradient correction
    '''
    Z, Z2, zd, z2d, P, pd = bundle.Z, bundle.Z2, bundle.zd, bundle.z2d, bundle.P, bundle.pd
    u = lam.f + lam.g
    v = lam.f + 2.0 * lam.g

    Z_sq = bundle.power('Z', 2)
    Z2_sq = bundle.power('Z2', 2)
    P_sq = bundle.power('P', 2)

    ZZd = Z * zd[None, :]
    Z2Z2d = Z2 * z2d[None, :]
    ZdZZd = zd[:, None] * ZZd
    Z2dZ2Z2d = z2d[:, None] * Z2Z2d
    PdPPd = pd[:, None] * P * pd[None, :]

    M1 = ZdZZd - Z2dZ2Z2d + bundle.power('Z', 3) - bundle.power('Z2', 3)
    M2 = ((Z + Z2) * (Z_sq - Z2_sq)
          + pd[:, None] * (ZZd + Z2Z2d)
          + 2.0 * z2d[:, None] * (ZZd - Z2Z2d)
          + 2.0 * Z2_sq * P)
    M3 = (2.0 * pd[:, None] * Z2 * z2d[None, :]
          + 2.0 * Z2_sq * P
          + z2d[:, None] * P * z2d[None, :]
          + z2d[:, None] * P * pd[None, :])

    A1 = (12.0 * _outer(u, M1, u)
          - 6.0 * _outer(v, M2, u)
          + 3.0 * _outer(v, M3, v)
          - 12.0 * float(np.sum(lam.d * (zd ** 2 - z2d ** 2)))
          + 6.0 * float(np.sum(lam.t * pd * (zd + 3.0 * z2d)))
          - 6.0 * float(np.sum(lam.e * pd * z2d)))

    core = 0.75 * PdPPd + 0.5 * bundle.power('P', 3)

    N1 = (core
          + z2d[:, None] * P * pd[None, :]
          + pd[:, None] * Z2 * pd[None, :]
          + 2.0 * Z2 * P_sq)
    N2 = P * (Z_sq - Z2_sq) + pd[:, None] * (ZZd - Z2Z2d)

    A2 = (-3.0 * _outer(v, N1, v)
          + 6.0 * _outer(v, N2, u)
          - 3.0 * float(np.sum((2.0 * lam.t - lam.e) * pd ** 2)))

    A3 = _outer(v, core, v)

    return A1 / phi, A2 / phi, A3 / phi


def _precision_terms(res):
    '''
    d(2), d(3) at the restricted precision estimate, or None if phi is known
    '''
    if res.phi_known:
        return None

    derivs = fam_api.phi_derivs(res.family, res.phi_hat)
    if derivs.d2 == 0.0:
        raise DegenerateError('Correction factor undefined', 'd(2) vanishes at the restricted precision estimate')
    return derivs


def _geometry(res, hyp, X, bundle=None, lam=None):
    Xm = fit_api.as_matrix(X)
    if bundle is None:
        bundle = build_zbundle(Xm, hyp.tested_indices, res.weights)
    if lam is None:
        lam = lambda_diagonals(res.family, res.link, res.eta)
    return Xm, bundle, lam


def _cubic_terms(kind, q, A1, A2, A3, A1_bphi, A2_bphi):
    A11 = A1 + A1_bphi
    A22 = A2 + A2_bphi
    return CorrectionTerms(kind=kind, A1=A1, A2=A2, A3=A3, A1_bphi=A1_bphi, A2_bphi=A2_bphi,
                           a=A3 / (12.0 * q * (q + 2) * (q + 4)),
                           b=(A22 - 2.0 * A3) / (12.0 * q * (q + 2)),
                           c=(A11 - A22 + A3) / (12.0 * q))


def _bphi_terms(derivs, n, p, q):
    if derivs is None:
        return 0.0, 0.0
    d2, d3 = derivs.d2, derivs.d3
    return (6.0 * q * (d3 + (2 - p + q) * d2) / (n * d2 ** 2),
            3.0 * q * (q + 2) / (n * d2))


def correction_lr(res, hyp, X, bundle=None, lam=None):
    '''
    @brief Bartlett correction of the likelihood ratio statistic

    A = A_LR + A_LR,bphi with the precision part
    3q [d(2) (2 + q - 2p) + 2 d(3)] / (n d(2)^2), which is dropped when phi is known.

    @param res    Restricted fit
    @param hyp    Hypothesis
    @param X      Design
    @param bundle Optional precomputed ZBundle at the restricted fit
    @param lam    Optional precomputed LambdaDiagonals at the restricted fit
    @return CorrectionTerms with a = a_LR
    '''
    Xm, bundle, lam = _geometry(res, hyp, X, bundle, lam)
    n, p = Xm.shape
    q = hyp.q

    A1 = lr_regression_term(bundle, lam, res.phi_hat)

    derivs = _precision_terms(res)
    if derivs is None:
        A1_bphi = 0.0
    else:
        A1_bphi = 3.0 * q * (derivs.d2 * (2 + q - 2 * p) + 2.0 * derivs.d3) / (n * derivs.d2 ** 2)

    return CorrectionTerms(kind=CorrectionKind.LR, A1=A1, A1_bphi=A1_bphi, a=(A1 + A1_bphi) / (12.0 * q))


def correction_score(res, hyp, X, bundle=None, lam=None):
    '''
    @brief Bartlett-type correction of the score statistic
    '''
    Xm, bundle, lam = _geometry(res, hyp, X, bundle, lam)
    n, p = Xm.shape
    A1, A2, A3 = score_terms(bundle, lam, res.phi_hat)
    A1_bphi, A2_bphi = _bphi_terms(_precision_terms(res), n, p, hyp.q)

    return _cubic_terms(CorrectionKind.SCORE, hyp.q, A1, A2, A3, A1_bphi, A2_bphi)


def correction_gradient(res, hyp, X, bundle=None, lam=None):
    '''
    @brief Bartlett-type correction of the gradient statistic

    The precision parts coincide with those of the score correction.
    '''
    Xm, bundle, lam = _geometry(res, hyp, X, bundle, lam)
    n, p = Xm.shape
    A1, A2, A3 = gradient_terms(bundle, lam, res.phi_hat)
    A1_bphi, A2_bphi = _bphi_terms(_precision_terms(res), n, p, hyp.q)

    return _cubic_terms(CorrectionKind.GRADIENT, hyp.q, A1, A2, A3, A1_bphi, A2_bphi)


def describe_hypothesis(hyp, column_names=None):
    names = column_names or [f'beta[{i}]' for i in range(max(hyp.tested_indices) + 1)]
    return ', '.join(f'{names[i]} = {b:g}' for i, b in zip(hyp.tested_indices, hyp.beta10))


def statistics_report(unres, res, hyp, X, column_names=None):
    '''
    @brief Classical and corrected statistics of a pair of fits

    @param unres        Unrestricted fit
    @param res          Restricted fit
    @param hyp          Hypothesis
    @param X            Design
    @param column_names Optional labels used in the hypothesis text
    @return TestReport in table order (Wald, LR, score, gradient, corrected LR, score, gradient)
    '''
    fam, link = unres.family, unres.link
    classical = classical_statistics(unres, res, hyp, fam, link, X)

    Xm, bundle, lam = _geometry(res, hyp, X)
    corrections = {Statistic.LR_CORRECTED: (Statistic.LR, correction_lr(res, hyp, Xm, bundle, lam)),
                   Statistic.SCORE_CORRECTED: (Statistic.SCORE, correction_score(res, hyp, Xm, bundle, lam)),
                   Statistic.GRADIENT_CORRECTED: (Statistic.GRADIENT, correction_gradient(res, hyp, Xm, bundle, lam))}

    q = hyp.q
    records = []
    for name in Statistic.table_order():
        if name.corrected:
            base, terms = corrections[name]
            records.append(make_record(name, terms.apply(classical[base]), q, terms))
        else:
            records.append(make_record(name, classical[name], q))

    return TestReport(hypothesis=describe_hypothesis(hyp, column_names), records=tuple(records))


def full_test_report(X, y, fam, link, hyp, options=None):
    '''
    @brief Fit both models and compute all seven statistics with their p-values

    @param X       Design (DesignMatrix or array)
    @param y       Response vector
    @param fam     Family
    @param link    Link
    @param hyp     Hypothesis
    @param options Optional FitOptions
    @return TestReport
    '''
    if not isinstance(X, fit_api.DesignMatrix):
        X = fit_api.DesignMatrix(X)
    hyp.validate(X.p)

    unres = fit_api.fit_irls(X, y, fam, link, options=options, phi_known=hyp.phi_known)
    res = fit_api.fit_restricted(X, y, fam, link, hyp, options=options)

    report = statistics_report(unres, res, hyp, X, list(X.column_names))

    log_event(RunLogger.EventType.TEST, uuid.uuid4(),
              f'{report.hypothesis}: ' + ', '.join(f'{r.name.value}={r.value:.6g}' for r in report.records))
    return report
