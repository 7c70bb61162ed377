#
# conftest.py - Shared test fixtures
#
# (C) 2026 glmcorr developers
#

import os

import numpy as np
import pandas as pd
import pytest

import glmcorr.__config__

from glmcorr.api import family as fam_api
from glmcorr.api import link as link_api
from glmcorr.api.family import FamilySpec
from glmcorr.api.fit import DesignMatrix
from glmcorr.api.link import LinkSpec

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')

SQUID_COVARIATES = ('RL', 'WL', 'RNL', 'NWL', 'W')


@pytest.fixture
def squid_path():
    return os.path.join(DATA_DIR, 'squid.csv')


@pytest.fixture
def squid(squid_path):
    '''
    Design with intercept and the five beak measurements, response is the weight
    '''
    frame = pd.read_csv(squid_path, comment='#')
    X = np.column_stack([np.ones(len(frame))] + [frame[c].to_numpy() for c in SQUID_COVARIATES])
    return DesignMatrix(X, ('(Intercept)',) + SQUID_COVARIATES), frame['weight'].to_numpy()


@pytest.fixture(autouse=True)
def restore_config():
    '''
    Tests may tweak the global configuration, restore it afterwards
    '''
    saved = {k: v for k, v in vars(glmcorr.__config__).items() if not k.startswith('__')}
    yield
    for k, v in saved.items():
        setattr(glmcorr.__config__, k, v)


@pytest.fixture
def make_instance():
    '''
    Factory for random regression problems with an intercept and uniform covariates

    Returns (X, y) drawn from the given family with all coefficients set to `beta`.
    '''
    def factory(seed, n=12, p=4, fam=FamilySpec.GAMMA, link=LinkSpec.LOG, phi=5.0, beta=0.5):
        rng = np.random.default_rng(seed)
        X = np.column_stack([np.ones(n), rng.uniform(size=(n, p - 1))])
        mu = link_api.mu_of_eta(link, X @ np.full(p, beta))
        y = fam_api.sample_response(fam, mu, phi, rng)
        return DesignMatrix(X), y

    return factory
