#
# __cli__.py - Command line front end
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
Command line interface

```
glmcorr fit      --data squid.csv --response weight --family gamma --link log
glmcorr test     --data squid.csv --response weight --family gamma --test-cols RNL,NWL
glmcorr test     --data squid.csv --response weight --family gamma --phi0 30
glmcorr simulate --family gamma --n 20 --p 4 --q 3 --phi 1 --reps 15000 --output table1
```

Every option can also be given in an INI file (`--config FILE`, section `[run]`, keys named like the
options with underscores). Options on the command line override the file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
'''

import argparse
import configparser
import logging
import os
import re
import sys

from dataclasses import dataclass

import numpy as np
import pandas as pd

import glmcorr
import glmcorr.__config__

from glmcorr.__common__ import Constants, ExitCode
from glmcorr.__encoding__ import CsvEncoder, JsonEncoder, report_document
from glmcorr.__errors__ import DataError, DomainError, GlmError, InputFileError, ScenarioError
from glmcorr.api import fit as fit_api
from glmcorr.api import simulate as sim_api
from glmcorr.api.beta_tests import full_test_report
from glmcorr.api.family import FamilySpec
from glmcorr.api.link import LinkSpec
from glmcorr.api.phi_tests import PhiHypothesis, phi_test_report

logger = logging.getLogger(__name__)

INTERCEPT = '(Intercept)'


@dataclass
class RunConfig:
    '''
    @brief Resolved settings of one command line run
    '''
    subcommand: str
    data_path: str = None
    response_column: str = None
    covariate_columns: tuple = None
    intercept: bool = True
    family: FamilySpec = FamilySpec.GAMMA
    link: LinkSpec = LinkSpec.LOG
    test_columns: tuple = None
    null_values: tuple = None
    phi0: float = None
    alpha: float = 0.05
    output_format: str = 'table'
    output: str = None
    seed: int = 0
    replications: int = Constants.replications
    workers: int = 1
    n: int = None
    p: int = None
    q: int = None
    phi: float = None
    covariates_law: str = 'uniform'
    deltas: tuple = None
    levels: tuple = Constants.nominal_levels


def _split(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(item.strip() for item in str(text).split(',') if item.strip())


def _floats(text):
    items = _split(text)
    return None if items is None else tuple(float(i) for i in items)


def _add_common(parser):
    parser.add_argument('--config', help='INI file with a [run] section providing default option values')
    parser.add_argument('--format', dest='format', choices=['table', 'json', 'csv'], default='table',
                        help='Output format')
    parser.add_argument('--output', help='Output file (simulate: file name prefix)')
    parser.add_argument('--log-dir', dest='log_dir', help='Enable structured event logging into this directory')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='Increase diagnostic output')


def _add_model(parser):
    parser.add_argument('--data', help='CSV file with header row')
    parser.add_argument('--response', help='Response column')
    parser.add_argument('--covariates', help='Comma separated covariate columns (default: all others)')
    parser.add_argument('--no-intercept', dest='intercept', action='store_false', default=True,
                        help='Do not add an intercept column')
    parser.add_argument('--family', default='gamma', help='normal, gamma or inverse-normal')
    parser.add_argument('--link', default='log', help='log, identity, reciprocal or reciprocal-squared')


def build_parser():
    parser = argparse.ArgumentParser(prog='glmcorr',
                                     description='Corrected likelihood ratio, score and gradient tests in GLMs',
                                     epilog='exit codes: 0 success, 2 usage error, 3 invalid data, '
                                            '4 numerical failure, 5 missing or unreadable input file')
    parser.add_argument('--version', action='version', version=f'%(prog)s {glmcorr.__version__}')
    sub = parser.add_subparsers(dest='subcommand', required=True)

    fit = sub.add_parser('fit', help='Fit a model and print estimates')
    _add_model(fit)
    _add_common(fit)

    test = sub.add_parser('test', help='Test a hypothesis on the coefficients or the precision parameter')
    _add_model(test)
    test.add_argument('--test-cols', dest='test_cols', help='Comma separated tested columns (names or indices)')
    test.add_argument('--null-values', dest='null_values', help='Comma separated null values (default: zeros)')
    test.add_argument('--phi0', type=float, help='Test H0: phi = phi0 instead')
    test.add_argument('--alpha', type=float, default=0.05, help='Level of the reported decisions')
    _add_common(test)

    simulate = sub.add_parser('simulate', help='Monte Carlo size and power experiment')
    simulate.add_argument('--family', default='gamma')
    simulate.add_argument('--link', default='log')
    simulate.add_argument('--n', type=int, required=False)
    simulate.add_argument('--p', type=int, required=False)
    simulate.add_argument('--q', type=int, required=False)
    simulate.add_argument('--phi', type=float, required=False, help='True precision parameter')
    simulate.add_argument('--covariates-law', dest='covariates_law', choices=['uniform', 'normal'],
                          default='uniform')
    simulate.add_argument('--delta', help='Comma separated alternatives. Without it null rates are simulated.')
    simulate.add_argument('--levels', default=','.join(str(a) for a in Constants.nominal_levels),
                          help='Comma separated nominal levels')
    simulate.add_argument('--seed', type=int, default=0)
    simulate.add_argument('--reps', type=int, default=Constants.replications)
    simulate.add_argument('--workers', type=int, default=glmcorr.__config__.sim_workers)
    _add_common(simulate)

    parser.subcommands = {'fit': fit, 'test': test, 'simulate': simulate}
    return parser


def read_config_file(path):
    '''
    @brief Read the [run] section of an INI file

    @return Dictionary option name -> string value
    '''
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding='utf-8') as f:
            parser.read_file(f)
    except OSError as e:
        raise InputFileError('Cannot read configuration file', f'{path}: {e}')
    except configparser.Error as e:
        raise DataError('Malformed configuration file', str(e), line=getattr(e, 'lineno', None))

    if not parser.has_section('run'):
        raise DataError('Configuration file has no [run] section', path)

    values = {key.replace('-', '_'): value for key, value in parser.items('run')}
    if 'reps' not in values and 'replications' in values:
        values['reps'] = values.pop('replications')
    if 'intercept' in values:
        values['intercept'] = parser.getboolean('run', 'intercept')
    return values


def parse_args(argv):
    '''
    @brief Parse the command line, using the configuration file values as defaults
    '''
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        values = read_config_file(args.config)
        subparser = parser.subcommands[args.subcommand]
        known = set(vars(subparser.parse_known_args([])[0]))
        unknown = sorted(set(values) - known)
        if unknown:
            raise ScenarioError('Unknown configuration keys', ', '.join(unknown))
        subparser.set_defaults(**values)
        args = parser.parse_args(argv)

    return args


def to_run_config(args):
    try:
        family = FamilySpec.from_name(args.family)
        link = LinkSpec.from_name(args.link)
    except DomainError as e:
        raise ScenarioError(e.description, e.detail)

    cfg = RunConfig(subcommand=args.subcommand, family=family, link=link, output_format=args.format,
                    output=args.output)

    if args.subcommand in ('fit', 'test'):
        cfg.data_path = args.data
        cfg.response_column = args.response
        cfg.covariate_columns = _split(args.covariates)
        cfg.intercept = bool(args.intercept)
        if not cfg.data_path or not cfg.response_column:
            raise ScenarioError('Options --data and --response are required')

    if args.subcommand == 'test':
        cfg.test_columns = _split(args.test_cols)
        cfg.null_values = _floats(args.null_values)
        cfg.phi0 = None if args.phi0 is None else float(args.phi0)
        cfg.alpha = float(args.alpha)
        if (cfg.test_columns is None) == (cfg.phi0 is None):
            raise ScenarioError('Give exactly one hypothesis: --test-cols or --phi0')
        if cfg.null_values is not None and cfg.phi0 is not None:
            raise ScenarioError('Null values belong to coefficient hypotheses only')

    if args.subcommand == 'simulate':
        for name in ('n', 'p', 'q', 'phi'):
            if getattr(args, name) is None:
                raise ScenarioError(f'Option --{name} is required')
        cfg.n, cfg.p, cfg.q, cfg.phi = int(args.n), int(args.p), int(args.q), float(args.phi)
        cfg.covariates_law = args.covariates_law
        cfg.deltas = _floats(args.delta)
        cfg.levels = _floats(args.levels)
        cfg.seed = int(args.seed)
        cfg.replications = int(args.reps)
        cfg.workers = int(args.workers)

    return cfg


def _data_lines(path):
    '''
    1-based line numbers of the data rows (no comments, no blank lines, no header)
    '''
    with open(path, encoding='utf-8') as f:
        lines = [i + 1 for i, line in enumerate(f) if line.strip() and not line.lstrip().startswith('#')]
    return lines[1:]


def load_table(path, columns):
    '''
    @brief Read the CSV columns needed for a model

    Lines starting with '#' are comments.

    @param path    CSV file with header row
    @param columns Required column names
    @return pandas DataFrame with float columns
    '''
    if not os.path.isfile(path):
        raise InputFileError('Data file not found', path)

    try:
        frame = pd.read_csv(path, comment='#', skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DataError('Data file is empty', path)
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise DataError('Malformed CSV file', f'{path}: {e}', line=int(match.group(1)) if match else None)

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError('Columns not found in data file', f'{", ".join(missing)} (available: {", ".join(frame.columns)})')

    lines = _data_lines(path)
    result = {}
    for c in columns:
        values = pd.to_numeric(frame[c], errors='coerce')
        bad = np.flatnonzero(values.isna().to_numpy())
        if bad.size:
            row = int(bad[0])
            line = lines[row] if row < len(lines) else None
            raise DataError(f'Non numeric value in column \'{c}\'', f'{path}, line {line}: {frame[c].iloc[row]!r}',
                            line=line)
        result[c] = values.astype(float)

    return pd.DataFrame(result)


def build_model(cfg):
    '''
    @brief Design matrix and response of a fit or test run
    '''
    header = pd.read_csv(cfg.data_path, comment='#', nrows=0).columns if os.path.isfile(cfg.data_path) else []
    covariates = cfg.covariate_columns
    if covariates is None:
        covariates = tuple(str(c).strip() for c in header if str(c).strip() != cfg.response_column)

    frame = load_table(cfg.data_path, (cfg.response_column,) + tuple(covariates))

    columns = [frame[c].to_numpy() for c in covariates]
    names = list(covariates)
    if cfg.intercept:
        columns.insert(0, np.ones(len(frame)))
        names.insert(0, INTERCEPT)

    X = fit_api.DesignMatrix(np.column_stack(columns), tuple(names))
    return X, frame[cfg.response_column].to_numpy()


def resolve_columns(items, names):
    '''
    Map column names or 0-based design indices to design indices
    '''
    indices = []
    for item in items:
        if item in names:
            indices.append(names.index(item))
        elif re.fullmatch(r'\d+', item) and int(item) < len(names):
            indices.append(int(item))
        else:
            raise ScenarioError(f'Unknown tested column \'{item}\'', 'Design columns: ' + ', '.join(names))
    return tuple(indices)


def _emit(cfg, text):
    if cfg.output:
        with open(cfg.output, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _report_table(report, alpha=None):
    lines = [f'H0: {report.hypothesis}', '',
             f'{"statistic":<10} {"value":>12} {"df":>4} {"p-value":>10}' + ('  decision' if alpha else '')]
    for r in report.records:
        line = f'{r.name.value:<10} {r.value:>12.4f} {r.df:>4d} {r.p_value:>10.4f}'
        if alpha:
            line += '  reject' if r.p_value <= alpha else '  accept'
        if r.flagged:
            line += '  (negative, p-value from zero)'
        lines.append(line)
    return '\n'.join(lines) + '\n'


def cmd_fit(cfg):
    '''
    @brief Fit a model and write the estimates
    '''
    X, y = build_model(cfg)
    fit = fit_api.fit_irls(X, y, cfg.family, cfg.link)
    rows = fit_api.coefficient_table(fit, X)
    se_phi = fit_api.se_phi(fit, cfg.family, X.n)

    if cfg.output_format == 'json':
        text = report_document('fit', {'fit': fit, 'coefficients': rows, 'phi_hat': fit.phi_hat, 'se_phi': se_phi,
                                       'deviance_residuals': fit.deviance_residuals(),
                                       'pearson_residuals': fit.pearson_residuals()},
                               columns=list(X.column_names)) + '\n'
    elif cfg.output_format == 'csv':
        text = CsvEncoder.encode(CsvEncoder.coefficient_frame(rows))
    else:
        lines = [f'{cfg.family.value} model, {cfg.link.value} link, n = {X.n}, p = {X.p}', '',
                 f'{"coefficient":<14} {"estimate":>12} {"std.error":>12} {"z":>9} {"p-value":>10}']
        for row in rows:
            lines.append(f'{row.name:<14} {row.estimate:>12.4f} {row.std_error:>12.4f} {row.z:>9.3f} {row.p_value:>10.4f}')
        lines += ['', f'phi = {fit.phi_hat:.3f} ({se_phi:.3f})',
                  f'deviance = {fit.deviance:.6g}, log-likelihood = {fit.loglik:.6g}, iterations = {fit.iterations}',
                  '', 'deviance residuals:',
                  ' '.join(f'{r:.4f}' for r in fit.deviance_residuals())]
        text = '\n'.join(lines) + '\n'

    _emit(cfg, text)
    return ExitCode.SUCCESS


def cmd_test(cfg):
    '''
    @brief Run all seven tests of the configured hypothesis
    '''
    X, y = build_model(cfg)

    if cfg.phi0 is not None:
        fit = fit_api.fit_irls(X, y, cfg.family, cfg.link)
        report = phi_test_report(fit, PhiHypothesis(cfg.phi0))
    else:
        indices = resolve_columns(cfg.test_columns, list(X.column_names))
        hyp = fit_api.Hypothesis(tested_indices=indices, beta10=cfg.null_values)
        report = full_test_report(X, y, cfg.family, cfg.link, hyp)

    if cfg.output_format == 'json':
        text = report_document('test', report, family=cfg.family.value, link=cfg.link.value) + '\n'
    elif cfg.output_format == 'csv':
        text = CsvEncoder.encode(CsvEncoder.test_report_frame(report))
    else:
        text = _report_table(report, cfg.alpha)

    _emit(cfg, text)
    return ExitCode.SUCCESS


def _rate_text(table):
    sc = table.scenario
    levels = sc.nominal_levels
    lines = [f'{sc.family.value}, n = {sc.n}, p = {sc.p}, q = {sc.q}, phi = {sc.phi_true:g}, delta = {sc.delta:g}, '
             f'replications = {sc.replications}, failed = {table.failed}', '',
             f'{"statistic":<10} ' + ' '.join(f'{100 * a:>8g}%' for a in levels)]
    for s in table.statistics:
        lines.append(f'{s.value:<10} ' + ' '.join(f'{table.rates[(s, a)]:>9.2f}' for a in levels))
    return '\n'.join(lines) + '\n'


def cmd_simulate(cfg):
    '''
    @brief Run a size or power experiment and write rate tables plus a run manifest
    '''
    scenario = sim_api.SimScenario(family=cfg.family, link=cfg.link, n=cfg.n, p=cfg.p, q=cfg.q, phi_true=cfg.phi,
                                   covariate_law=sim_api.CovariateLaw(cfg.covariates_law),
                                   nominal_levels=cfg.levels, replications=cfg.replications, master_seed=cfg.seed)
    scenario.validate()

    if cfg.deltas is None:
        tables = [sim_api.run_null_rates(scenario, workers=cfg.workers)]
    else:
        tables = list(sim_api.run_power_grid(scenario, cfg.deltas, workers=cfg.workers).values())

    csv_text = CsvEncoder.encode(pd.concat([CsvEncoder.rate_table_frame(t) for t in tables], ignore_index=True))
    json_text = report_document('simulate', tables) + '\n'

    if cfg.output:
        manifest = {'schema_version': Constants.report_schema_version,
                    'version': glmcorr.__version__,
                    'seed': scenario.master_seed,
                    'replications': scenario.replications,
                    'workers': cfg.workers,
                    'runs': [{'delta': t.scenario.delta,
                              'scenario_hash': f'{t.scenario.scenario_hash():016x}',
                              'failed_replications': t.failed,
                              'flagged': {s.value: n for s, n in t.flagged.items()}} for t in tables],
                    'files': [cfg.output + '.csv', cfg.output + '.json']}

        for name, text in ((cfg.output + '.csv', csv_text), (cfg.output + '.json', json_text),
                           (cfg.output + '.manifest.json', JsonEncoder.encode(manifest) + '\n')):
            with open(name, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
    elif cfg.output_format == 'json':
        sys.stdout.write(json_text)
    elif cfg.output_format == 'csv':
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write('\n'.join(_rate_text(t) for t in tables))

    return ExitCode.SUCCESS


def main(argv=None):
    '''
    @brief Command line entry point

    @param argv Arguments without the program name, defaults to sys.argv[1:]
    @return Exit code
    '''
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return ExitCode.SUCCESS if e.code in (0, None) else ExitCode.USAGE
    except GlmError as e:
        sys.stderr.write(f'{e}\n')
        return e.exit_code

    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format='%(levelname)s [%(name)s] %(message)s')

    if args.log_dir:
        glmcorr.__config__.log_events = True
        glmcorr.__config__.log_dir = args.log_dir

    commands = {'fit': cmd_fit, 'test': cmd_test, 'simulate': cmd_simulate}

    try:
        cfg = to_run_config(args)
        return commands[cfg.subcommand](cfg)
    except GlmError as e:
        logger.debug('Run failed', exc_info=True)
        sys.stderr.write(f'{e}\n')
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f'{InputFileError("Cannot access file", str(e))}\n')
        return ExitCode.FILE
