#
# api/phi_tests/__init__.py - Tests on the precision parameter
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
@brief Tests of H0: phi = phi0 with the regression parameters as nuisance

The statistics only depend on a1 and its derivatives, the sample size and the number of regression
parameters. The general a1 based expressions are used for every family. All correction quantities are
evaluated at phi0. The reference distribution is chi-squared with one degree of freedom.
'''

import math
import uuid

from dataclasses import dataclass

from glmcorr.__common__ import CorrectionKind, Statistic
from glmcorr.__errors__ import DegenerateError, DomainError
from glmcorr.__logging__ import RunLogger, log_event
from glmcorr.api import family as fam_api
from glmcorr.api.beta_tests import CorrectionTerms, TestReport, make_record


@dataclass(frozen=True)
class PhiHypothesis:
    '''
    @brief Null hypothesis H0: phi = phi0
    '''
    phi0: float

    def __post_init__(self):
        if not (math.isfinite(self.phi0) and self.phi0 > 0.0):
            raise DomainError('Null value of the precision parameter must be positive', f'phi0={self.phi0!r}')

    def __json__(self):
        return {'phi0': self.phi0}

    @staticmethod
    def from_params(params):
        return PhiHypothesis(phi0=float(params['phi0']))


def phi_classical(fam, phi_hat, phi0, n):
    '''
    @brief Likelihood ratio, Wald, score and gradient statistics for H0: phi = phi0

    @param fam     Family
    @param phi_hat Unrestricted precision estimate
    @param phi0    Null value
    @param n       Number of observations
    @return Dictionary Statistic -> value
    '''
    at_hat = fam_api.phi_derivs(fam, phi_hat)
    at_null = fam_api.phi_derivs(fam, phi0)
    diff = phi_hat - phi0

    return {Statistic.LR: 2.0 * n * (at_hat.a1 - at_null.a1 - diff * at_hat.a1_1),
            Statistic.WALD: -n * diff ** 2 * at_hat.a1_2,
            Statistic.SCORE: -n * (at_hat.a1_1 - at_null.a1_1) ** 2 / at_null.a1_2,
            Statistic.GRADIENT: n * (at_null.a1_1 - at_hat.a1_1) * diff}


def phi_lr_epsilon(fam, phi0, p, n):
    '''
    @brief Bartlett correction term of the likelihood ratio statistic, S*_LR = S_LR / (1 + epsilon)
    '''
    d = _derivs(fam, phi0)
    return (-p * (p - 2) / (4.0 * n * d.d2)
            + (2.0 * p * d.d3 + d.d4) / (4.0 * n * d.d2 ** 2)
            - 5.0 * d.d3 ** 2 / (12.0 * n * d.d2 ** 3))


def phi_score_terms(fam, phi0, p, n):
    d = _derivs(fam, phi0)
    A1 = -3.0 * p * (p - 2) / (n * d.d2 ** 2)
    A2 = -3.0 * (2.0 * p * d.d3 + d.d4) / (n * d.d2 ** 2)
    A3 = -5.0 * d.d3 ** 2 / (n * d.d2 ** 3)
    return CorrectionTerms(kind=CorrectionKind.SCORE, A1=A1, A2=A2, A3=A3,
                           a=A3 / 180.0, b=(A2 - 2.0 * A3) / 36.0, c=(A1 - A2 + A3) / 12.0)


def phi_gradient_terms(fam, phi0, p, n):
    d = _derivs(fam, phi0)
    A1 = (-3.0 * p * (p + 2) / (n * d.d2)
          - 3.0 * (3.0 * p * d.d3 - 4.0 * d.d4) / (n * d.d2 ** 2)
          - 18.0 * d.d3 ** 2 / (n * d.d2 ** 3))
    A2 = -3.0 * (p * d.d3 - d.d4) / (n * d.d2 ** 2) - 33.0 * d.d3 ** 2 / (4.0 * n * d.d2 ** 3)
    A3 = -5.0 * d.d3 ** 2 / (4.0 * n * d.d2 ** 3)
    return CorrectionTerms(kind=CorrectionKind.GRADIENT, A1=A1, A2=A2, A3=A3,
                           a=A3 / 180.0, b=(A2 - 2.0 * A3) / 36.0, c=(A1 - A2 + A3) / 12.0)


def _derivs(fam, phi0):
    d = fam_api.phi_derivs(fam, phi0)
    if d.d2 == 0.0:
        raise DegenerateError('Correction factor undefined', f'd(2) vanishes at phi0={phi0!r}')
    return d


def phi_corrected(fam, phi0, p, n, statistics):
    '''
    @brief Corrected likelihood ratio, score and gradient statistics

    @param fam        Family
    @param phi0       Null value
    @param p          Number of regression parameters
    @param n          Number of observations
    @param statistics Classical statistics as returned by `phi_classical`
    @return Dictionary Statistic -> (value, CorrectionTerms)
    '''
    epsilon = phi_lr_epsilon(fam, phi0, p, n)
    lr = CorrectionTerms(kind=CorrectionKind.LR, A1=12.0 * epsilon, a=epsilon)
    score = phi_score_terms(fam, phi0, p, n)
    gradient = phi_gradient_terms(fam, phi0, p, n)

    return {Statistic.LR_CORRECTED: (lr.apply(statistics[Statistic.LR]), lr),
            Statistic.SCORE_CORRECTED: (score.apply(statistics[Statistic.SCORE]), score),
            Statistic.GRADIENT_CORRECTED: (gradient.apply(statistics[Statistic.GRADIENT]), gradient)}


def phi_test_report(fit, hyp, p=None):
    '''
    @brief All seven statistics for H0: phi = phi0 from an unrestricted fit

    @param fit Unrestricted fit with estimated precision
    @param hyp PhiHypothesis
    @param p   Number of regression parameters, defaults to the size of the fit
    @return TestReport with one degree of freedom per statistic
    '''
    if fit.phi_known:
        raise DomainError('Precision parameter of the fit is known, nothing to test')

    p = fit.p if p is None else p
    classical = phi_classical(fit.family, fit.phi_hat, hyp.phi0, fit.n)
    corrected = phi_corrected(fit.family, hyp.phi0, p, fit.n, classical)

    records = []
    for name in Statistic.table_order():
        if name.corrected:
            value, terms = corrected[name]
            records.append(make_record(name, value, 1, terms))
        else:
            records.append(make_record(name, classical[name], 1))

    report = TestReport(hypothesis=f'phi = {hyp.phi0:g}', records=tuple(records))
    log_event(RunLogger.EventType.TEST, uuid.uuid4(),
              f'{report.hypothesis}: ' + ', '.join(f'{r.name.value}={r.value:.6g}' for r in report.records))
    return report
