#
# test_cli.py - Command line front end
#
# (C) 2026 glmcorr developers
#

import io
import json

import pandas as pd
import pytest

import glmcorr.__logging__

from glmcorr import DataError
from glmcorr.__cli__ import load_table, main, resolve_columns
from glmcorr.__common__ import ExitCode
from glmcorr.__errors__ import ScenarioError


@pytest.fixture
def model_args(squid_path):
    return ['--data', squid_path, '--response', 'weight', '--family', 'gamma', '--link', 'log']


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestFit:

    def test_json(self, capsys, model_args):
        code, out, _ = run(capsys, ['fit'] + model_args + ['--format', 'json'])
        document = json.loads(out)

        assert code == ExitCode.SUCCESS
        assert document['schema_version'] == 1
        assert document['kind'] == 'fit'
        assert document['columns'] == ['(Intercept)', 'RL', 'WL', 'RNL', 'NWL', 'W']
        assert document['result']['phi_hat'] == pytest.approx(44.001, abs=0.01)
        assert document['result']['coefficients'][0]['estimate'] == pytest.approx(-2.2899, abs=1e-3)
        assert len(document['result']['deviance_residuals']) == 22

    def test_csv(self, capsys, model_args):
        code, out, _ = run(capsys, ['fit'] + model_args + ['--format', 'csv'])
        frame = pd.read_csv(io.StringIO(out))

        assert code == ExitCode.SUCCESS
        assert list(frame.columns) == ['name', 'estimate', 'std_error', 'z', 'p_value']
        assert list(frame['name']) == ['(Intercept)', 'RL', 'WL', 'RNL', 'NWL', 'W']

    def test_table(self, capsys, model_args):
        code, out, _ = run(capsys, ['fit'] + model_args)
        assert code == ExitCode.SUCCESS
        assert 'gamma model, log link, n = 22, p = 6' in out
        assert 'phi = 44.0' in out

    def test_selected_covariates(self, capsys, model_args):
        code, out, _ = run(capsys, ['fit'] + model_args + ['--covariates', 'NWL,W', '--format', 'json'])
        document = json.loads(out)
        assert code == ExitCode.SUCCESS
        assert [row['estimate'] for row in document['result']['coefficients']] == pytest.approx(
            [-2.1339, 2.1428, 2.9749], abs=2e-3)

    def test_output_file(self, capsys, model_args, tmp_path):
        target = tmp_path / 'fit.csv'
        code, out, _ = run(capsys, ['fit'] + model_args + ['--format', 'csv', '--output', str(target)])
        assert code == ExitCode.SUCCESS
        assert out == ''
        assert target.read_text().startswith('name,estimate')


class TestTest:

    def test_table(self, capsys, model_args):
        code, out, _ = run(capsys, ['test'] + model_args + ['--test-cols', 'RNL,NWL', '--alpha', '0.05'])

        assert code == ExitCode.SUCCESS
        assert out.startswith('H0: RNL = 0, NWL = 0')
        wald = next(line for line in out.splitlines() if line.startswith('S_W '))
        assert wald.endswith('reject')

    def test_json(self, capsys, model_args):
        code, out, _ = run(capsys, ['test'] + model_args + ['--test-cols', 'RNL,NWL', '--format', 'json'])
        document = json.loads(out)
        records = {r['name']: r for r in document['result']['records']}

        assert code == ExitCode.SUCCESS
        assert document['family'] == 'gamma'
        assert len(records) == 7
        assert records['S_W']['value'] == pytest.approx(7.0659, abs=5e-3)
        assert records['S*_T']['df'] == 2

    def test_indices_and_names_agree(self, capsys, model_args):
        _, by_name, _ = run(capsys, ['test'] + model_args + ['--test-cols', 'RNL,NWL', '--format', 'csv'])
        _, by_index, _ = run(capsys, ['test'] + model_args + ['--test-cols', '3,4', '--format', 'csv'])
        assert by_name == by_index

    def test_precision(self, capsys, model_args):
        code, out, _ = run(capsys, ['test'] + model_args + ['--phi0', '30', '--format', 'csv'])
        frame = pd.read_csv(io.StringIO(out))

        assert code == ExitCode.SUCCESS
        assert set(frame['hypothesis']) == {'phi = 30'}
        assert set(frame['df']) == {1}
        assert len(frame) == 7

    def test_both_hypotheses(self, capsys, model_args):
        code, _, err = run(capsys, ['test'] + model_args + ['--test-cols', 'RNL', '--phi0', '30'])
        assert code == ExitCode.USAGE
        assert 'exactly one hypothesis' in err

    def test_no_hypothesis(self, capsys, model_args):
        assert run(capsys, ['test'] + model_args)[0] == ExitCode.USAGE

    def test_unknown_column(self, capsys, model_args):
        assert run(capsys, ['test'] + model_args + ['--test-cols', 'beak'])[0] == ExitCode.USAGE


class TestInputErrors:

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, ['fit', '--data', str(tmp_path / 'none.csv'), '--response', 'y'])
        assert code == ExitCode.FILE
        assert 'not found' in err

    def test_missing_config_file(self, capsys, tmp_path):
        assert run(capsys, ['fit', '--config', str(tmp_path / 'none.ini')])[0] == ExitCode.FILE

    def test_rank_deficient_design(self, capsys, tmp_path):
        path = tmp_path / 'twins.csv'
        path.write_text('a,b,y\n' + ''.join(f'{i},{i},{1.0 + 0.1 * i}\n' for i in range(8)))
        code, _, err = run(capsys, ['fit', '--data', str(path), '--response', 'y'])
        assert code == ExitCode.NUMERICAL
        assert 'GLM-0002' in err

    def test_error_kinds_have_distinct_codes(self):
        assert len({ExitCode.FILE, ExitCode.DATA, ExitCode.NUMERICAL, ExitCode.USAGE}) == 4

    def test_non_numeric_cell(self, capsys, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('# comment\nx,y\n1,2\n3,abc\n4,5\n')
        code, _, err = run(capsys, ['fit', '--data', str(path), '--response', 'y'])
        assert code == ExitCode.DATA
        assert 'line 4' in err

    def test_ragged_row(self, tmp_path):
        path = tmp_path / 'ragged.csv'
        path.write_text('x,y\n1,2\n3,4,5\n')
        with pytest.raises(DataError) as info:
            load_table(str(path), ('x', 'y'))
        assert info.value.line == 3

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.csv'
        path.write_text('')
        with pytest.raises(DataError, match='empty'):
            load_table(str(path), ('y',))

    def test_missing_column(self, capsys, squid_path):
        code, _, err = run(capsys, ['fit', '--data', squid_path, '--response', 'weight', '--covariates', 'RL,beak'])
        assert code == ExitCode.DATA
        assert 'beak' in err

    def test_unknown_family(self, capsys, model_args):
        assert run(capsys, ['fit'] + model_args + ['--family', 'poisson'])[0] == ExitCode.USAGE

    def test_unknown_option(self, capsys):
        assert run(capsys, ['fit', '--frobnicate'])[0] == ExitCode.USAGE

    def test_help(self, capsys):
        code, out, _ = run(capsys, ['--help'])
        assert code == ExitCode.SUCCESS
        assert 'simulate' in out
        assert 'exit codes' in out and 'unreadable' in out

    def test_nonpositive_response(self, capsys, tmp_path):
        path = tmp_path / 'neg.csv'
        path.write_text('x,y\n' + ''.join(f'{i},{1.0 if i != 3 else -1.0}\n' for i in range(8)))
        assert run(capsys, ['fit', '--data', str(path), '--response', 'y'])[0] == ExitCode.NUMERICAL


class TestColumns:

    def test_resolve(self):
        names = ['(Intercept)', 'a', 'b']
        assert resolve_columns(('b', '1'), names) == (2, 1)
        with pytest.raises(ScenarioError):
            resolve_columns(('3',), names)


class TestConfigFile:

    def test_values_from_file(self, capsys, squid_path, tmp_path):
        config = tmp_path / 'run.ini'
        config.write_text(f'[run]\ndata = {squid_path}\nresponse = weight\nfamily = gamma\nformat = json\n')

        code, out, _ = run(capsys, ['fit', '--config', str(config)])
        assert code == ExitCode.SUCCESS
        assert json.loads(out)['kind'] == 'fit'

    def test_command_line_wins(self, capsys, squid_path, tmp_path):
        config = tmp_path / 'run.ini'
        config.write_text(f'[run]\ndata = {squid_path}\nresponse = weight\nformat = json\n')

        code, out, _ = run(capsys, ['fit', '--config', str(config), '--format', 'csv'])
        assert code == ExitCode.SUCCESS
        assert out.startswith('name,estimate')

    def test_unknown_key(self, capsys, tmp_path):
        config = tmp_path / 'run.ini'
        config.write_text('[run]\nfamilly = gamma\n')
        code, _, err = run(capsys, ['fit', '--config', str(config)])
        assert code == ExitCode.USAGE
        assert 'familly' in err

    def test_missing_section(self, capsys, tmp_path):
        config = tmp_path / 'run.ini'
        config.write_text('[model]\nfamily = gamma\n')
        assert run(capsys, ['fit', '--config', str(config)])[0] == ExitCode.DATA


class TestSimulate:

    ARGS = ['simulate', '--family', 'gamma', '--n', '12', '--p', '3', '--q', '1', '--phi', '2',
            '--reps', '6', '--seed', '3']

    def test_files_are_reproducible(self, capsys, tmp_path):
        first, second = str(tmp_path / 'first'), str(tmp_path / 'second')
        assert run(capsys, self.ARGS + ['--output', first])[0] == ExitCode.SUCCESS
        assert run(capsys, self.ARGS + ['--output', second])[0] == ExitCode.SUCCESS

        for suffix in ('.csv', '.json'):
            with open(first + suffix, 'rb') as a, open(second + suffix, 'rb') as b:
                assert a.read() == b.read()

        with open(first + '.manifest.json') as a, open(second + '.manifest.json') as b:
            manifest_a, manifest_b = json.load(a), json.load(b)
        assert manifest_a.pop('files') != manifest_b.pop('files')
        assert manifest_a == manifest_b
        assert manifest_a['seed'] == 3

    def test_power_grid_csv(self, capsys):
        code, out, _ = run(capsys, self.ARGS + ['--delta', '0.5,1', '--format', 'csv'])
        frame = pd.read_csv(io.StringIO(out))

        assert code == ExitCode.SUCCESS
        assert sorted(set(frame['delta'])) == [0.5, 1.0]
        assert set(frame['statistic']) == {'S*_LR', 'S*_R', 'S*_T'}
        assert len(frame) == 2 * 3 * 3

    def test_table(self, capsys):
        code, out, _ = run(capsys, self.ARGS + ['--levels', '0.1'])
        assert code == ExitCode.SUCCESS
        assert 'replications = 6' in out
        assert sum(1 for line in out.splitlines() if line.startswith('S')) == 7

    def test_missing_size(self, capsys):
        code, _, err = run(capsys, ['simulate', '--p', '3', '--q', '1', '--phi', '2'])
        assert code == ExitCode.USAGE
        assert '--n' in err

    def test_infeasible(self, capsys):
        args = ['simulate', '--n', '12', '--p', '3', '--q', '5', '--phi', '2', '--reps', '2']
        assert run(capsys, args)[0] == ExitCode.USAGE


class TestEventLog:

    def test_log_dir(self, capsys, model_args, tmp_path, monkeypatch):
        monkeypatch.setattr(glmcorr.__logging__, '__run_logger__', None)
        code, _, _ = run(capsys, ['test'] + model_args + ['--test-cols', 'RNL', '--log-dir', str(tmp_path)])
        glmcorr.__logging__.run_logger().close()

        assert code == ExitCode.SUCCESS
        logs = list(tmp_path.glob('glmcorr_*.log'))
        assert len(logs) == 1
        assert ' Test ' in logs[0].read_text()
