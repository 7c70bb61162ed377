#
# api/geometry/__init__.py - Weighted projection geometry of a fit
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
@brief Weighted projection geometry

- Z = X (X^T W X)^-1 X^T and Z2 = X2 (X2^T W X2)^-1 X2^T with their diagonals
- the auxiliary regression R = X1 - X2 A, A = (X2^T W X2)^-1 X2^T W X1
- the per observation diagonals f, g, lambda1..lambda5, t, d, e, b, h, m built from the link derivative
  chain and the variance function

Hadamard powers of Z, Z2 and Z - Z2 are computed on first use and cached.
'''

import threading

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from glmcorr.__errors__ import DomainError, SingularDesignError
from glmcorr.api import family as fam_api
from glmcorr.api import link as link_api


def _projection(X, sw):
    '''
    X (X^T W X)^-1 X^T from the QR decomposition of W^(1/2) X
    '''
    n, k = X.shape
    if k == 0:
        return np.zeros((n, n))

    _, R = scipy.linalg.qr(sw[:, None] * X, mode='economic')
    diag = np.abs(np.diag(R))
    if diag.min() <= np.finfo(float).eps * max(X.shape) * diag.max():
        raise SingularDesignError('Weighted design is numerically rank deficient',
                                  f'min |R_jj| = {diag.min():.3g}, max |R_jj| = {diag.max():.3g}')

    C = scipy.linalg.solve_triangular(R, X.T, trans='T')
    return C.T @ C


class ZBundle:
    '''
    @brief Projection matrices of the full and the nuisance design under the weights W

    The object is immutable after construction. The Hadamard power cache is filled under a lock, so
    concurrent readers see each power computed exactly once.
    '''

    def __init__(self, Z, Z2, R, A, weights):
        self.Z = Z
        self.Z2 = Z2
        self.R = R
        self.A = A
        self.weights = weights

        self.zd = np.diag(Z).copy()
        self.z2d = np.diag(Z2).copy()
        self.P = Z - Z2
        self.pd = self.zd - self.z2d

        self._powers = {}
        self._lock = threading.Lock()

    @property
    def n(self):
        return self.Z.shape[0]

    def power(self, which, k):
        '''
        @brief Hadamard power of 'Z', 'Z2' or 'P' (= Z - Z2)

        @param which Matrix name
        @param k     Exponent, 1..3
        @return Elementwise k-th power
        '''
        base = {'Z': self.Z, 'Z2': self.Z2, 'P': self.P}.get(which)
        if base is None or k not in (1, 2, 3):
            raise DomainError('Unknown Hadamard power', f'which={which!r}, k={k!r}')
        if k == 1:
            return base

        key = (which, k)
        with self._lock:
            if key not in self._powers:
                self._powers[key] = base ** k
            return self._powers[key]

    def __repr__(self):
        return f'ZBundle (n={self.n}, trace(WZ)={np.sum(self.weights * self.zd):.6g})'


@dataclass(frozen=True, eq=False)
class LambdaDiagonals:
    '''
    @brief Per observation diagonals of the correction factors
    '''
    f: np.ndarray
    g: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: np.ndarray
    lambda4: np.ndarray
    lambda5: np.ndarray
    t: np.ndarray
    d: np.ndarray
    e: np.ndarray
    b: np.ndarray
    h: np.ndarray
    m: np.ndarray


def build_zbundle(X, tested_indices, weights):
    '''
    @brief Build the projection bundle

    X1 consists of the tested columns, X2 of the remaining ones. If every column is tested X2 is empty
    and Z2 as well as A vanish.

    @param X              n x p design (DesignMatrix or array)
    @param tested_indices Column indices of X1
    @param weights        Positive IRLS weights
    @return ZBundle
    '''
    X = X.X if hasattr(X, 'column_names') else np.asarray(X, dtype=float)
    w = np.asarray(weights, dtype=float)
    if w.shape != (X.shape[0],) or not np.all(w > 0.0):
        raise DomainError('Weights must be a positive vector with one entry per observation')

    tested = list(tested_indices)
    rest = [i for i in range(X.shape[1]) if i not in tested]
    X1, X2 = X[:, tested], X[:, rest]
    sw = np.sqrt(w)

    Z = _projection(X, sw)
    Z2 = _projection(X2, sw)

    if X2.shape[1]:
        A = np.linalg.lstsq(sw[:, None] * X2, sw[:, None] * X1, rcond=None)[0]
    else:
        A = np.zeros((0, X1.shape[1]))

    return ZBundle(Z=Z, Z2=Z2, R=X1 - X2 @ A, A=A, weights=w)


def lambda_diagonals(fam, link, eta):
    '''
    @brief Diagonals f, g, lambda1..5, t, d, e, b, h, m at the linear predictor eta

    @param fam  Family
    @param link Link
    @param eta  Linear predictor
    @return LambdaDiagonals
    '''
    mu, d1, d2, d3 = (np.atleast_1d(c) for c in link_api.link_chain(link, eta))
    V, dV, d2V = fam_api.variance_fn(fam, mu)

    f = d1 * d2 / V
    g = f - dV * d1 ** 3 / V ** 2

    l1 = dV * d1 ** 2 * d2 / V ** 2
    l2 = d2 ** 2 / V
    l3 = d1 * d3 / V
    l4 = dV ** 2 * d1 ** 4 / V ** 3
    l5 = d2V * d1 ** 4 / V ** 2

    return LambdaDiagonals(f=f, g=g, lambda1=l1, lambda2=l2, lambda3=l3, lambda4=l4, lambda5=l5,
                           t=-9.0 * l1 + 3.0 * l2 + 3.0 * l3 + 4.0 * l4 - 2.0 * l5,
                           d=-5.0 * l1 + 2.0 * l2 + 2.0 * l3 + 2.0 * l4 - l5,
                           e=-12.0 * l1 + 3.0 * l2 + 4.0 * l3 + 6.0 * l4 - 3.0 * l5,
                           b=l3 + l4,
                           h=l1 + l5,
                           m=-4.0 * l1 + l2 + 2.0 * l4 - l5)
