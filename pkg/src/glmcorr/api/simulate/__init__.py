#
# api/simulate/__init__.py - Monte Carlo size and power experiments
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
@brief Monte Carlo experiments

Null rejection rates and powers of the tests of H0: beta_1 = ... = beta_q = 0.

The covariates are drawn once per (seed, n, p, covariate law) and held fixed across replications and
across alternatives. Every replication draws its responses from its own counter based generator
(Philox keyed by master seed, scenario hash and replication index), so the result does not depend on
the number of worker processes or the order in which replications finish.

Replications whose fits fail are excluded from all denominators. A negative corrected statistic is
excluded from the denominator of that statistic only.
'''

import concurrent.futures
import hashlib
import json
import logging
import math
import uuid

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.stats

import glmcorr.__config__

from glmcorr.__common__ import Constants, Statistic
from glmcorr.__errors__ import DomainError, GlmError, ScenarioError, SimulationError
from glmcorr.__logging__ import RunLogger, log_event
from glmcorr.api import family as fam_api
from glmcorr.api import link as link_api
from glmcorr.api import special
from glmcorr.api.beta_tests import full_test_report
from glmcorr.api.family import FamilySpec
from glmcorr.api.fit import DesignMatrix, Hypothesis
from glmcorr.api.link import LinkSpec

logger = logging.getLogger(__name__)


class CovariateLaw (str, Enum):
    UNIFORM01 = 'uniform'
    STDNORMAL = 'normal'


@dataclass(frozen=True)
class SimScenario:
    '''
    @brief Monte Carlo scenario

    Unless `beta_true` is given, the q tested coefficients are set to `delta` and all others to one.
    '''
    family: FamilySpec
    n: int
    p: int
    q: int
    phi_true: float
    covariate_law: CovariateLaw = CovariateLaw.UNIFORM01
    link: LinkSpec = LinkSpec.LOG
    delta: float = 0.0
    nominal_levels: tuple = Constants.nominal_levels
    replications: int = Constants.replications
    master_seed: int = 0
    beta_true: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'nominal_levels', tuple(float(a) for a in self.nominal_levels))
        object.__setattr__(self, 'covariate_law', CovariateLaw(self.covariate_law))
        object.__setattr__(self, 'family', FamilySpec(self.family))
        object.__setattr__(self, 'link', LinkSpec(self.link))
        if self.beta_true is not None:
            object.__setattr__(self, 'beta_true', tuple(float(b) for b in self.beta_true))

    def validate(self):
        if not 1 <= self.q <= self.p:
            raise ScenarioError('Number of tested coefficients must lie in 1..p', f'p={self.p}, q={self.q}')
        if self.p >= self.n:
            raise ScenarioError('Scenario needs more observations than coefficients', f'n={self.n}, p={self.p}')
        if not (math.isfinite(self.phi_true) and self.phi_true > 0.0):
            raise ScenarioError('Precision parameter must be positive', f'phi={self.phi_true!r}')
        if self.master_seed < 0:
            raise ScenarioError('Seed must be nonnegative', f'seed={self.master_seed!r}')
        if self.replications < 1:
            raise ScenarioError('At least one replication is required')
        if not self.nominal_levels or any(not 0.0 < a <= 1.0 for a in self.nominal_levels):
            raise ScenarioError('Nominal levels must lie in (0, 1]', f'levels={list(self.nominal_levels)}')
        if self.beta_true is not None and len(self.beta_true) != self.p:
            raise ScenarioError('True coefficient vector must have p entries', f'{len(self.beta_true)} != {self.p}')

    def coefficients(self):
        if self.beta_true is not None:
            return np.asarray(self.beta_true)
        beta = np.ones(self.p)
        beta[:self.q] = self.delta
        return beta

    def hypothesis(self):
        return Hypothesis(tested_indices=tuple(range(self.q)))

    def scenario_hash(self):
        '''
        Stable 64 bit hash of everything except seed and replication count
        '''
        key = json.dumps({'family': self.family.value, 'link': self.link.value, 'n': self.n, 'p': self.p,
                          'q': self.q, 'phi': repr(float(self.phi_true)), 'law': self.covariate_law.value,
                          'beta': [repr(float(b)) for b in self.coefficients()]}, sort_keys=True)
        return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], 'little')

    def __json__(self):
        return {'family': self.family.value, 'link': self.link.value, 'n': self.n, 'p': self.p, 'q': self.q,
                'phi_true': self.phi_true, 'covariate_law': self.covariate_law.value, 'delta': self.delta,
                'nominal_levels': list(self.nominal_levels), 'replications': self.replications,
                'master_seed': self.master_seed, 'beta_true': list(self.coefficients())}

    @staticmethod
    def from_params(params):
        return SimScenario(family=FamilySpec(params['family']), link=LinkSpec(params['link']),
                           n=int(params['n']), p=int(params['p']), q=int(params['q']),
                           phi_true=float(params['phi_true']), covariate_law=CovariateLaw(params['covariate_law']),
                           delta=float(params['delta']), nominal_levels=tuple(params['nominal_levels']),
                           replications=int(params['replications']), master_seed=int(params['master_seed']),
                           beta_true=tuple(params['beta_true']) if params.get('beta_true') else None)


@dataclass(frozen=True, eq=False)
class RateTable:
    '''
    @brief Rejection rates of one scenario

    `rates[(statistic, level)]` is the rejection rate in percent, `mcse` the Monte Carlo standard error
    in percentage points. `used[statistic]` counts the replications entering the denominator of a
    statistic. `samples` holds the statistic values of all used replications.
    '''
    scenario: SimScenario
    statistics: tuple
    rates: dict
    mcse: dict
    used: dict
    failed: int
    flagged: dict
    samples: dict = field(default_factory=dict)

    def rate(self, statistic, level):
        return self.rates[(Statistic(statistic), float(level))]

    def rows(self):
        '''
        Rows (statistic, level, rate, mcse, used, flagged) in table order
        '''
        for s in self.statistics:
            for a in self.scenario.nominal_levels:
                yield s, a, self.rates[(s, a)], self.mcse[(s, a)], self.used[s], self.flagged.get(s, 0)

    def __json__(self):
        return {'schema_version': Constants.report_schema_version,
                'scenario': self.scenario,
                'scenario_hash': f'{self.scenario.scenario_hash():016x}',
                'failed_replications': self.failed,
                'rates': [{'statistic': s.value, 'level': a, 'rate': r, 'mcse': e, 'used': u, 'flagged': f}
                          for s, a, r, e, u, f in self.rows()]}


def design_matrix(sc):
    '''
    @brief Covariates of a scenario

    The stream is keyed by seed, n, p and covariate law only, so all alternatives of a power grid share
    the same design.
    '''
    law_id = 0 if sc.covariate_law is CovariateLaw.UNIFORM01 else 1
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([sc.master_seed, sc.n, sc.p, law_id])))

    if sc.covariate_law is CovariateLaw.UNIFORM01:
        X = rng.uniform(size=(sc.n, sc.p))
    else:
        X = rng.standard_normal(size=(sc.n, sc.p))

    return DesignMatrix(X)


def replication_rng(sc, scenario_hash, index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([sc.master_seed, scenario_hash, index])))


def _replicate(sc, X, mu, hyp, scenario_hash, index):
    '''
    One replication. Returns (index, {statistic: value} or None, error text)
    '''
    rng = replication_rng(sc, scenario_hash, index)
    y = fam_api.sample_response(sc.family, mu, sc.phi_true, rng)

    try:
        report = full_test_report(X, y, sc.family, sc.link, hyp)
    except (GlmError, np.linalg.LinAlgError) as e:
        return index, None, str(e) or type(e).__name__

    return index, {r.name: r.value for r in report.records}, ''


def _run_chunk(sc, X, mu, scenario_hash, indices):
    hyp = sc.hypothesis()
    return [_replicate(sc, X, mu, hyp, scenario_hash, i) for i in indices]


def _chunks(count, parts):
    bounds = np.linspace(0, count, parts + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]


def _simulate(sc, statistics, workers):
    sc.validate()

    workers = glmcorr.__config__.sim_workers if workers is None else int(workers)
    if workers < 1:
        raise ScenarioError('Number of workers must be positive', f'workers={workers}')

    X = design_matrix(sc)
    eta = X.X @ sc.coefficients()
    try:
        mu = np.atleast_1d(link_api.mu_of_eta(sc.link, eta))
        fam_api.check_mean(sc.family, mu)
    except DomainError as e:
        raise ScenarioError('Scenario gives means outside the domain of the family', str(e))

    scenario_hash = sc.scenario_hash()
    run_id = uuid.uuid4()

    logger.info('Simulating %d replications of %s with %d worker(s)', sc.replications, sc.family.value, workers)
    log_event(RunLogger.EventType.SIMULATION, run_id,
              f'start hash={scenario_hash:016x} reps={sc.replications} workers={workers}')

    if workers == 1:
        results = _run_chunk(sc, X, mu, scenario_hash, range(sc.replications))
    else:
        results = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_chunk, sc, X, mu, scenario_hash, chunk)
                       for chunk in _chunks(sc.replications, 4 * workers)]
            for future in concurrent.futures.as_completed(futures):
                results.extend(future.result())

    results.sort(key=lambda r: r[0])

    failed = [(i, error) for i, values, error in results if values is None]
    for i, error in failed:
        log_event(RunLogger.EventType.REPLICATION, run_id, f'replication {i} failed: {error.splitlines()[0]}')

    failure_rate = len(failed) / sc.replications
    if failure_rate > glmcorr.__config__.sim_failure_limit:
        raise SimulationError('Too many failed replications',
                              f'{len(failed)} of {sc.replications} ({100.0 * failure_rate:.2f}%)')
    if failure_rate > glmcorr.__config__.sim_failure_warn:
        logger.warning('%d of %d replications failed', len(failed), sc.replications)

    table = _tabulate(sc, statistics, [values for _, values, _ in results if values is not None], len(failed))

    log_event(RunLogger.EventType.SIMULATION, run_id, f'done failed={len(failed)}')
    return table


def _tabulate(sc, statistics, values, failed):
    rates, mcse, used, flagged, samples = {}, {}, {}, {}, {}

    for s in statistics:
        sample = np.array([v[s] for v in values], dtype=float)
        negative = sample < 0.0 if s.corrected else np.zeros(sample.shape, dtype=bool)
        flagged[s] = int(np.sum(negative))
        sample = sample[~negative]
        samples[s] = sample
        used[s] = sample.size

        df = sc.q
        for a in sc.nominal_levels:
            if sample.size == 0:
                rates[(s, a)] = math.nan
                mcse[(s, a)] = math.nan
                continue
            # p-value <= alpha, so alpha = 1 rejects every replication
            p_values = special.chisq_sf(np.maximum(sample, 0.0), special.ChiSqRef(df))
            r = float(np.mean(p_values <= a))
            rates[(s, a)] = 100.0 * r
            mcse[(s, a)] = 100.0 * math.sqrt(r * (1.0 - r) / sample.size)

    return RateTable(scenario=sc, statistics=tuple(statistics), rates=rates, mcse=mcse, used=used,
                     failed=failed, flagged=flagged, samples=samples)


def run_null_rates(sc, workers=None):
    '''
    @brief Null rejection rates of all seven statistics

    @param sc      Scenario with delta = 0
    @param workers Number of worker processes, defaults to `__config__.sim_workers`
    @return RateTable
    '''
    if sc.delta != 0.0:
        raise ScenarioError('Null rejection rates require delta = 0', f'delta={sc.delta!r}')
    return _simulate(sc, Statistic.table_order(), workers)


def run_power(sc, workers=None):
    '''
    @brief Rejection rates of the corrected statistics with the tested coefficients set to delta
    '''
    return _simulate(sc, Statistic.corrected_only(), workers)


def run_power_grid(sc, deltas, workers=None):
    '''
    @brief Powers over a grid of alternatives, all sharing one design

    @return Dictionary delta -> RateTable
    '''
    return {float(d): run_power(replace(sc, delta=float(d)), workers) for d in deltas}


def ks_distance_to_chisq(sample, df):
    '''
    @brief Kolmogorov-Smirnov distance between a sample and the chi-squared distribution

    @param sample Statistic values
    @param df     Degrees of freedom
    @return Distance in [0, 1]
    '''
    a = np.asarray(sample, dtype=float)
    if a.size == 0:
        raise DomainError('Sample must not be empty')
    ref = special.ChiSqRef(df)
    return float(scipy.stats.kstest(a, lambda x: special.chisq_cdf(np.maximum(x, 0.0), ref)).statistic)
