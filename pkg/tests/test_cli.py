import io
import json

import pandas as pd
import pytest

from schmidt_qfim import cli, states, tools


def write_example(tmp_path, *args):
    filepath = str(tmp_path / 'state.json')
    assert cli.main(['example', *args, '--output', filepath]) == 0
    return filepath


def run_report(tmp_path, *args):
    output = str(tmp_path / 'report.json')
    code = cli.main([*args, '--output', output])
    with open(output, 'r', encoding='utf-8') as f:
        return code, json.load(f)


@pytest.mark.parametrize('args,certified', [
    (('mes', '--d', '3'), 3),
    (('rho-s', ), 2),
    (('product', '--d', '3'), 1),
])
def test_witness(tmp_path, args, certified):
    filepath = write_example(tmp_path, *args)
    code, report = run_report(tmp_path, 'witness', filepath)
    assert code == 0
    assert report['command'] == 'witness'
    assert report['schema_version'] == cli.SCHEMA_VERSION
    assert report['input']['dims'] == [3, 3]
    assert report['results']['certified_min_schmidt_number'] == certified
    if args[0] == 'rho-s':
        assert report['results']['h_value'] == pytest.approx(1.5, abs=1e-8)


def test_witness_errors(tmp_path, capsys):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"dims": [2, 2]}')
    assert cli.main(['witness', str(broken)]) == cli.EXIT_PARSE
    filepath = write_example(tmp_path, 'ghz', '--n', '3', '--d', '2')
    assert cli.main(['witness', filepath]) == cli.EXIT_INVALID
    assert 'error' in capsys.readouterr().err


def test_bound(tmp_path):
    code, report = run_report(tmp_path, 'bound', '--spin', '1/2', '--restarts', '4', '--seed',
                              '3')
    assert code == 0
    table = report['results']['table']
    assert [row['r'] for row in table] == [1, 2]
    assert table[1]['variance_sum'] == pytest.approx(2, abs=1e-3)
    assert table[1]['qfi_bound'] == pytest.approx(4 * table[1]['variance_sum'])
    assert report['results']['analytic']['r2_analytic'] == pytest.approx(2)
    assert report['seed'] == 3


def test_bound_is_deterministic(tmp_path):
    args = ['bound', '--spin', '1', '--r', '2', '--restarts', '3', '--max-iters', '200', '--seed',
            '11']
    _, first = run_report(tmp_path, *args)
    _, second = run_report(tmp_path, *args)
    del first['timestamp'], second['timestamp']
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_bound_rejects_invalid_spin():
    assert cli.main(['bound', '--spin', '1/3']) == cli.EXIT_INVALID


def test_certify_pure_exact(tmp_path):
    filepath = write_example(tmp_path, 'seven-qubit')
    code, report = run_report(tmp_path, 'certify', filepath, '--pure-exact')
    assert code == 0
    results = report['results']
    assert results['vector'] == '2x6,1;4x8,2x12,1;4x20,2x14,1'
    assert results['k_separability'] == 3
    assert results['depth'] == 4
    assert results['partition'] == '1|23|4567'


@pytest.mark.parametrize('vector,verdict', [('3,3,3', 'feasible'), ('3,3,2', 'infeasible')])
def test_certify_vector(tmp_path, vector, verdict):
    filepath = write_example(tmp_path, 'ghz', '--n', '3', '--d', '3')
    code, report = run_report(tmp_path, 'certify', filepath, '--vector', vector)
    assert code == 0
    assert report['results']['verdict'] == verdict
    assert len(report['results']['h_vector']) == 3
    assert report['parameters']['permutation_set'] == 'size-class'


def test_certify_bell_as_separable(tmp_path):
    filepath = write_example(tmp_path, 'bell')
    code, report = run_report(tmp_path, 'certify', filepath, '--vector', '1')
    assert code == 0
    assert report['results']['verdict'] == 'infeasible'
    assert report['results']['certificate'] == ['1|2']


def test_certify_above_cap_is_undecided(tmp_path):
    filepath = str(tmp_path / 'ghz8.json')
    tools.write_state(states.ghz_state(8), filepath)
    code, report = run_report(tmp_path, 'certify', filepath, '--vector', '2x127')
    assert code == cli.EXIT_UNDECIDED
    assert report['results']['verdict'] == 'undecided'


def test_figure1(capsys):
    assert cli.main(['figure1', '--d-list', '2,3,4,5']) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == 'd,r,bound,mes_sum'
    frame = pd.read_csv(io.StringIO(text), float_precision='round_trip')
    assert len(frame) == 2 + 3 + 4 + 5
    assert (frame['bound'] == 8 * (frame['d'] + frame['r'] - 2 / frame['r'])).all()
    assert (frame['mes_sum'] <= frame['bound'] + 1e-6).all()
    full = frame[frame['d'] == frame['r']]
    assert (abs(full['mes_sum'] - full['bound']) < 1e-6).all()
    row = frame[(frame['d'] == 3) & (frame['r'] == 2)].iloc[0]
    assert row['bound'] == pytest.approx(32)


def test_figure1_rejects_bad_dimensions():
    assert cli.main(['figure1', '--d-list', '1,2']) == cli.EXIT_INVALID
    assert cli.main(['figure1', '--d-list', 'two']) == cli.EXIT_INVALID


def test_example_to_stdout(capsys):
    assert cli.main(['example', 'rho-s', '--p', '0.5,0.5,0']) == 0
    state = tools.state_from_dict(json.loads(capsys.readouterr().out))
    assert state.dims == (3, 3)


def test_report_document_serialization():
    document = cli.ReportDocument(command='witness', input={}, parameters={}, results={'x': 1.5})
    assert 'timestamp' not in json.loads(document.to_json(include_timestamp=False))
    assert json.loads(document.to_json())['tool_version'] == cli.__version__


@pytest.mark.parametrize('components,sign', [('xy', '+'), ('xyz', '-')])
def test_bound_default_sign(tmp_path, components, sign):
    code, report = run_report(tmp_path, 'bound', '--spin', '1/2', '--components', components,
                              '--r', '1', '--restarts', '2', '--max-iters', '100', '--seed', '1')
    assert code == 0
    assert report['parameters']['sign'] == sign


def test_certify_rejects_entries_above_local_dimension(tmp_path):
    filepath = write_example(tmp_path, 'ghz', '--n', '3', '--d', '2')
    assert cli.main(['certify', filepath, '--vector', '4,4,4']) == cli.EXIT_INVALID
    assert cli.main(['certify', filepath, '--vector', '2,2,2']) == cli.EXIT_OK


def test_example_rejects_bad_weights(tmp_path):
    filepath = str(tmp_path / 'state.json')
    assert cli.main(['example', 'rho-s', '--p', 'a,b,c', '--output', filepath]) == cli.EXIT_INVALID
