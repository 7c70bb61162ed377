#
# test_beta_tests.py - Classical and corrected tests on the regression coefficients
#
# (C) 2026 glmcorr developers
#

import dataclasses
import math

import numpy as np
import pytest

from glmcorr import DegenerateError, FitMismatchError, SingularDesignError
from glmcorr.__common__ import CorrectionKind, Statistic
from glmcorr.__encoding__ import JsonEncoder
from glmcorr.api import beta_tests
from glmcorr.api import family as fam_api
from glmcorr.api import fit as fit_api
from glmcorr.api.beta_tests import CorrectionTerms, TestReport
from glmcorr.api.family import FamilySpec
from glmcorr.api.fit import DesignMatrix, Hypothesis
from glmcorr.api.geometry import lambda_diagonals
from glmcorr.api.link import LinkSpec


def projections(X, w, tested):
    '''
    Z and Z2 by explicit matrix inversion
    '''
    rest = [i for i in range(X.shape[1]) if i not in tested]
    W = np.diag(w)
    Z = X @ np.linalg.inv(X.T @ W @ X) @ X.T
    X2 = X[:, rest]
    Z2 = X2 @ np.linalg.inv(X2.T @ W @ X2) @ X2.T if rest else np.zeros_like(Z)
    return Z, Z2


def loop_lr(Z, Z2, lam, phi):
    f, g, m = lam.f, lam.g, lam.m
    n = len(f)
    total = 0.0
    for l in range(n):
        total += 3.0 * m[l] * (Z[l, l] ** 2 - Z2[l, l] ** 2)
        for c in range(n):
            z3 = Z[l, c] ** 3 - Z2[l, c] ** 3
            zzz = Z[l, l] * Z[l, c] * Z[c, c] - Z2[l, l] * Z2[l, c] * Z2[c, c]
            total += -4.0 * g[l] * z3 * (f[c] + g[c])
            total += f[l] * (2.0 * z3 + 3.0 * zzz) * f[c]
    return total / phi


def loop_score(Z, Z2, lam, phi):
    f, g = lam.f, lam.g
    k = f - g
    n = len(f)
    A1 = A2 = A3 = 0.0
    for l in range(n):
        p_ll = Z[l, l] - Z2[l, l]
        A1 -= 6.0 * lam.h[l] * p_ll * Z2[l, l]
        A2 += 3.0 * lam.b[l] * p_ll ** 2
        for c in range(n):
            p_lc = Z[l, c] - Z2[l, c]
            p_cc = Z[c, c] - Z2[c, c]
            A1 += 3.0 * f[l] * Z2[l, l] * p_lc * Z2[c, c] * f[c]
            A1 += 6.0 * f[l] * Z2[l, l] * Z2[l, c] * p_cc * k[c]
            A1 -= 6.0 * f[l] * Z2[l, c] ** 2 * p_lc * (2.0 * g[c] - f[c])
            A2 -= 3.0 * k[l] * p_ll * Z2[l, c] * p_cc * k[c]
            A2 -= 6.0 * f[l] * Z2[l, l] * p_lc * p_cc * k[c]
            A2 -= 6.0 * k[l] * p_lc ** 2 * Z2[l, c] * k[c]
            A3 += 3.0 * k[l] * p_ll * p_lc * p_cc * k[c]
            A3 += 2.0 * k[l] * p_lc ** 3 * k[c]
    return A1 / phi, A2 / phi, A3 / phi


def loop_gradient(Z, Z2, lam, phi):
    u = lam.f + lam.g
    v = lam.f + 2.0 * lam.g
    n = len(u)
    A1 = A2 = A3 = 0.0
    for l in range(n):
        z, z2 = Z[l, l], Z2[l, l]
        p = z - z2
        A1 += -12.0 * lam.d[l] * (z ** 2 - z2 ** 2) + 6.0 * lam.t[l] * p * (z + 3.0 * z2) - 6.0 * lam.e[l] * p * z2
        A2 -= 3.0 * (2.0 * lam.t[l] - lam.e[l]) * p ** 2
        for c in range(n):
            zlc, z2lc = Z[l, c], Z2[l, c]
            zcc, z2cc = Z[c, c], Z2[c, c]
            plc, pcc = zlc - z2lc, zcc - z2cc

            m1 = z * zlc * zcc - z2 * z2lc * z2cc + zlc ** 3 - z2lc ** 3
            m2 = ((zlc + z2lc) * (zlc ** 2 - z2lc ** 2) + p * (zlc * zcc + z2lc * z2cc)
                  + 2.0 * z2 * (zlc * zcc - z2lc * z2cc) + 2.0 * z2lc ** 2 * plc)
            m3 = 2.0 * p * z2lc * z2cc + 2.0 * z2lc ** 2 * plc + z2 * plc * z2cc + z2 * plc * pcc
            A1 += 12.0 * u[l] * m1 * u[c] - 6.0 * v[l] * m2 * u[c] + 3.0 * v[l] * m3 * v[c]

            core = 0.75 * p * plc * pcc + 0.5 * plc ** 3
            n1 = core + z2 * plc * pcc + p * z2lc * pcc + 2.0 * z2lc * plc ** 2
            n2 = plc * (zlc ** 2 - z2lc ** 2) + p * (zlc * zcc - z2lc * z2cc)
            A2 += -3.0 * v[l] * n1 * v[c] + 6.0 * v[l] * n2 * u[c]
            A3 += v[l] * core * v[c]
    return A1 / phi, A2 / phi, A3 / phi


def fitted_pair(X, y, fam, link, hyp):
    unres = fit_api.fit_irls(X, y, fam, link, phi_known=hyp.phi_known)
    res = fit_api.fit_restricted(X, y, fam, link, hyp)
    return unres, res


MODELS = [(FamilySpec.GAMMA, LinkSpec.LOG),
          (FamilySpec.GAMMA, LinkSpec.RECIPROCAL),
          (FamilySpec.INVERSE_NORMAL, LinkSpec.LOG),
          (FamilySpec.INVERSE_NORMAL, LinkSpec.RECIPROCAL_SQUARED),
          (FamilySpec.NORMAL, LinkSpec.LOG)]

SHAPES = [(n, p, q) for n in (8, 12) for p in (3, 4) for q in (1, 2)]


class TestCorrectionOracle:
    '''
    Matrix expressions against explicit double sums over the projection elements
    '''

    @pytest.mark.parametrize('fam, link', MODELS)
    @pytest.mark.parametrize('n, p, q', SHAPES)
    def test_regression_parts(self, make_instance, fam, link, n, p, q):
        hyp = Hypothesis(tested_indices=tuple(range(p - q, p)))

        for seed in range(7):
            X, y = make_instance(1000 * n + 100 * p + 10 * q + seed, n=n, p=p, fam=fam, link=link, phi=8.0, beta=0.3)
            res = fit_api.fit_restricted(X, y, fam, link, hyp)

            Z, Z2 = projections(X.X, res.weights, hyp.tested_indices)
            lam = lambda_diagonals(fam, link, res.eta)
            phi = res.phi_hat

            lr = beta_tests.correction_lr(res, hyp, X)
            score = beta_tests.correction_score(res, hyp, X)
            gradient = beta_tests.correction_gradient(res, hyp, X)

            assert lr.A1 == pytest.approx(loop_lr(Z, Z2, lam, phi), rel=1e-9, abs=1e-10)
            np.testing.assert_allclose((score.A1, score.A2, score.A3), loop_score(Z, Z2, lam, phi),
                                       rtol=1e-9, atol=1e-10)
            np.testing.assert_allclose((gradient.A1, gradient.A2, gradient.A3), loop_gradient(Z, Z2, lam, phi),
                                       rtol=1e-9, atol=1e-10)

    @pytest.mark.parametrize('seed', range(5))
    def test_precision_parts(self, make_instance, seed):
        X, y = make_instance(300 + seed, n=12, p=4)
        hyp = Hypothesis(tested_indices=(2, 3))
        res = fit_api.fit_restricted(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)
        d = fam_api.phi_derivs(FamilySpec.GAMMA, res.phi_hat)
        n, p, q = 12, 4, 2

        score = beta_tests.correction_score(res, hyp, X)
        gradient = beta_tests.correction_gradient(res, hyp, X)
        lr = beta_tests.correction_lr(res, hyp, X)

        assert score.A1_bphi == pytest.approx(6.0 * q * (d.d3 + (2 - p + q) * d.d2) / (n * d.d2 ** 2), rel=1e-12)
        assert score.A2_bphi == pytest.approx(3.0 * q * (q + 2) / (n * d.d2), rel=1e-12)
        assert (gradient.A1_bphi, gradient.A2_bphi) == (score.A1_bphi, score.A2_bphi)
        assert lr.A1_bphi == pytest.approx(3.0 * q * (d.d2 * (2 + q - 2 * p) + 2.0 * d.d3) / (n * d.d2 ** 2), rel=1e-12)

    def test_coefficient_assembly(self, make_instance):
        X, y = make_instance(400, n=12, p=4)
        hyp = Hypothesis(tested_indices=(1, 2, 3))
        res = fit_api.fit_restricted(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)
        terms = beta_tests.correction_gradient(res, hyp, X)
        q = 3
        A11, A22 = terms.A1 + terms.A1_bphi, terms.A2 + terms.A2_bphi

        assert terms.a == pytest.approx(terms.A3 / (12.0 * q * (q + 2) * (q + 4)), rel=1e-14)
        assert terms.b == pytest.approx((A22 - 2.0 * terms.A3) / (12.0 * q * (q + 2)), rel=1e-14)
        assert terms.c == pytest.approx((A11 - A22 + terms.A3) / (12.0 * q), rel=1e-14)

    @pytest.mark.parametrize('fam', [FamilySpec.GAMMA, FamilySpec.INVERSE_NORMAL])
    def test_precision_parts_halve_on_duplicated_rows(self, make_instance, fam):
        X, y = make_instance(450, n=12, p=4, fam=fam)
        doubled = DesignMatrix(np.vstack([X.X, X.X]))
        hyp = Hypothesis(tested_indices=(2, 3))

        single = fit_api.fit_restricted(X, y, fam, LinkSpec.LOG, hyp)
        double = fit_api.fit_restricted(doubled, np.concatenate([y, y]), fam, LinkSpec.LOG, hyp)
        assert double.phi_hat == pytest.approx(single.phi_hat, rel=1e-9)

        for correction in (beta_tests.correction_gradient, beta_tests.correction_score):
            a = correction(single, hyp, X)
            b = correction(double, hyp, doubled)
            assert b.A1_bphi == pytest.approx(a.A1_bphi / 2.0, rel=1e-8)
            assert b.A2_bphi == pytest.approx(a.A2_bphi / 2.0, rel=1e-8)


class TestLinearModel:
    '''
    Normal model with identity link, where the likelihood is exactly quadratic
    '''

    @pytest.fixture
    def normal_data(self):
        rng = np.random.default_rng(31)
        X = np.column_stack([np.ones(15), rng.normal(size=(15, 2))])
        y = X @ [1.0, 0.4, -0.3] + rng.normal(size=15)
        return fit_api.DesignMatrix(X), y

    def test_known_precision_statistics_coincide(self, normal_data):
        X, y = normal_data
        hyp = Hypothesis(tested_indices=(1, 2), phi_known=1.0)
        report = beta_tests.full_test_report(X, y, FamilySpec.NORMAL, LinkSpec.IDENTITY, hyp)
        values = report.values()

        for name in (Statistic.WALD, Statistic.SCORE, Statistic.GRADIENT):
            assert values[name] == pytest.approx(values[Statistic.LR], rel=1e-9)
        for corrected, base in ((Statistic.LR_CORRECTED, Statistic.LR),
                                (Statistic.SCORE_CORRECTED, Statistic.SCORE),
                                (Statistic.GRADIENT_CORRECTED, Statistic.GRADIENT)):
            assert values[corrected] == pytest.approx(values[base], rel=1e-12)
            assert report[corrected].correction.a == 0.0

    def test_known_precision_terms_vanish(self, normal_data):
        X, y = normal_data
        hyp = Hypothesis(tested_indices=(2,), phi_known=1.0)
        res = fit_api.fit_restricted(X, y, FamilySpec.NORMAL, LinkSpec.IDENTITY, hyp)
        for terms in (beta_tests.correction_score(res, hyp, X), beta_tests.correction_gradient(res, hyp, X)):
            assert (terms.A1, terms.A2, terms.A3, terms.A1_bphi, terms.A2_bphi) == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_precision_part_of_lr_correction(self):
        rng = np.random.default_rng(32)
        X = np.column_stack([np.ones(10), rng.normal(size=10)])
        y = 1.0 + X[:, 1] + rng.normal(size=10)
        hyp = Hypothesis(tested_indices=(1,))
        res = fit_api.fit_restricted(X, y, FamilySpec.NORMAL, LinkSpec.IDENTITY, hyp)

        terms = beta_tests.correction_lr(res, hyp, X)
        assert terms.A1 == 0.0
        assert terms.A1_bphi == pytest.approx(3.0, rel=1e-12)
        assert terms.a == pytest.approx(0.25, rel=1e-12)


class TestClassicalStatistics:

    def test_inactive_restriction(self, make_instance):
        X, y = make_instance(41, n=20, p=4)
        unres = fit_api.fit_irls(X, y, FamilySpec.GAMMA, LinkSpec.LOG)
        hyp = Hypothesis(tested_indices=(1, 3), beta10=tuple(unres.beta_hat[[1, 3]]))
        res = fit_api.fit_restricted(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)

        stats = beta_tests.classical_statistics(unres, res, hyp, FamilySpec.GAMMA, LinkSpec.LOG, X)
        assert stats[Statistic.WALD] == 0.0
        assert stats[Statistic.GRADIENT] == 0.0
        assert beta_tests.gradient_identity_check(unres, res, hyp, X) == 0.0

    @pytest.mark.parametrize('seed', range(20))
    def test_gradient_duality(self, make_instance, seed):
        X, y = make_instance(500 + seed, n=15, p=4, beta=0.4)
        hyp = Hypothesis(tested_indices=(1, 2))
        unres, res = fitted_pair(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)

        stats = beta_tests.classical_statistics(unres, res, hyp, FamilySpec.GAMMA, LinkSpec.LOG, X)
        assert beta_tests.gradient_identity_check(unres, res, hyp, X) == pytest.approx(
            stats[Statistic.GRADIENT], rel=1e-9, abs=1e-12)

    def test_gradient_duality_reciprocal_link(self, make_instance):
        X, y = make_instance(77, n=20, p=3, link=LinkSpec.RECIPROCAL, beta=1.0)
        hyp = Hypothesis(tested_indices=(2,))
        unres, res = fitted_pair(X, y, FamilySpec.GAMMA, LinkSpec.RECIPROCAL, hyp)

        stats = beta_tests.classical_statistics(unres, res, hyp, FamilySpec.GAMMA, LinkSpec.RECIPROCAL, X)
        assert beta_tests.gradient_identity_check(unres, res, hyp, X) == pytest.approx(
            stats[Statistic.GRADIENT], rel=1e-9, abs=1e-12)
        assert stats[Statistic.SCORE] >= 0.0

    def test_nuisance_reparameterization(self, make_instance):
        X, y = make_instance(42, n=20, p=4)
        M = np.array([[1.0, 0.5], [0.2, -1.0]])
        Xb = np.column_stack([X.X[:, [0, 1]] @ M, X.X[:, [2, 3]]])
        hyp = Hypothesis(tested_indices=(2, 3))

        a = beta_tests.full_test_report(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp).values()
        b = beta_tests.full_test_report(Xb, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp).values()
        for name in Statistic.table_order():
            assert b[name] == pytest.approx(a[name], rel=1e-5, abs=1e-7)

    def test_mismatched_fits(self, make_instance):
        X, y = make_instance(43, n=20, p=4)
        hyp = Hypothesis(tested_indices=(1,))
        other = Hypothesis(tested_indices=(2,))
        unres, res = fitted_pair(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)

        with pytest.raises(FitMismatchError):
            beta_tests.classical_statistics(unres, res, other, FamilySpec.GAMMA, LinkSpec.LOG, X)
        with pytest.raises(FitMismatchError):
            beta_tests.classical_statistics(res, res, hyp, FamilySpec.GAMMA, LinkSpec.LOG, X)
        with pytest.raises(FitMismatchError):
            beta_tests.classical_statistics(unres, res, hyp, FamilySpec.INVERSE_NORMAL, LinkSpec.LOG, X)

    def test_singular_restricted_information(self, make_instance, monkeypatch):
        X, y = make_instance(44, n=20, p=4)
        hyp = Hypothesis(tested_indices=(1, 2))
        unres, res = fitted_pair(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)

        def singular(a, b):
            raise np.linalg.LinAlgError('Singular matrix')

        monkeypatch.setattr(np.linalg, 'solve', singular)
        with pytest.raises(SingularDesignError):
            beta_tests.classical_statistics(unres, res, hyp, FamilySpec.GAMMA, LinkSpec.LOG, X)


class TestReportContents:

    def test_order_and_degrees_of_freedom(self, make_instance):
        X, y = make_instance(44, n=20, p=4)
        report = beta_tests.full_test_report(X, y, FamilySpec.GAMMA, LinkSpec.LOG, Hypothesis(tested_indices=(1, 2)))

        assert [r.name for r in report.records] == Statistic.table_order()
        for record in report.records:
            assert record.df == 2
            assert record.p_value == pytest.approx(math.exp(-max(record.value, 0.0) / 2.0), rel=1e-12)
        assert report.hypothesis == 'x2 = 0, x3 = 0'

    def test_corrections_shrink_statistics(self, make_instance):
        X, y = make_instance(45, n=20, p=4)
        report = beta_tests.full_test_report(X, y, FamilySpec.GAMMA, LinkSpec.LOG, Hypothesis(tested_indices=(1, 2)))

        lr = report[Statistic.LR_CORRECTED]
        if lr.correction.a > 0.0 and report[Statistic.LR].value > 0.0:
            assert lr.value < report[Statistic.LR].value

        gradient = report[Statistic.GRADIENT_CORRECTED]
        S = report[Statistic.GRADIENT].value
        bracket = gradient.correction.c + gradient.correction.b * S + gradient.correction.a * S ** 2
        assert gradient.value == pytest.approx(S * (1.0 - bracket), rel=1e-14)
        if 0.0 < bracket < 1.0 and S > 0.0:
            assert gradient.value < S

    def test_lookup(self, make_instance):
        X, y = make_instance(46, n=20, p=3)
        report = beta_tests.full_test_report(X, y, FamilySpec.GAMMA, LinkSpec.LOG, Hypothesis(tested_indices=(2,)))
        assert Statistic.SCORE in report
        assert report['S*_T'] is report[Statistic.GRADIENT_CORRECTED]

    def test_json(self, make_instance):
        X, y = make_instance(47, n=20, p=3)
        report = beta_tests.full_test_report(X, y, FamilySpec.GAMMA, LinkSpec.LOG, Hypothesis(tested_indices=(2,)))
        again = TestReport.from_params(JsonEncoder.decode(JsonEncoder.encode(report)))
        assert again == report


class TestCorrectionTerms:

    def test_lr(self):
        assert CorrectionTerms(kind=CorrectionKind.LR, A1=3.0, a=0.25).apply(5.0) == 4.0

    def test_polynomial(self):
        terms = CorrectionTerms(kind=CorrectionKind.SCORE, A1=0.0, a=0.01, b=0.02, c=0.1)
        assert terms.apply(2.0) == pytest.approx(2.0 * (1.0 - (0.1 + 0.04 + 0.04)))

    def test_negative_value_is_flagged(self):
        record = beta_tests.make_record(Statistic.SCORE_CORRECTED, -0.5, 2)
        assert record.flagged and record.p_value == 1.0

    def test_classical_values_are_never_flagged(self):
        assert not beta_tests.make_record(Statistic.GRADIENT, -1e-12, 1).flagged

    def test_degenerate_precision(self, make_instance, monkeypatch):
        X, y = make_instance(48, n=12, p=3)
        hyp = Hypothesis(tested_indices=(2,))
        res = fit_api.fit_restricted(X, y, FamilySpec.GAMMA, LinkSpec.LOG, hyp)

        real = fam_api.phi_derivs

        def flat(fam, phi):
            return dataclasses.replace(real(fam, phi), d2=0.0)

        monkeypatch.setattr(fam_api, 'phi_derivs', flat)
        with pytest.raises(DegenerateError):
            beta_tests.correction_score(res, hyp, X)
