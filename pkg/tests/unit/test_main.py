import json
import math

import pytest

from sis.core import main

pytestmark = pytest.mark.usefixtures('restore_logging')

DISK = ['--family', 'typeC', '--a1', '-2.1213203435596424', '--zfunc', 'typeC_G']


def run_json(capsys, argv):
    code = main.run(argv)
    return code, json.loads(capsys.readouterr().out)


def csv_rows(text):
    lines = text.strip().splitlines()
    return lines[0], [[float(value) for value in line.split(',')] for line in lines[1:]]


'''Output Tests'''


def test_spectrum_csv(capsys):
    """Ensures proper function when the spectrum is written as CSV"""
    assert main.run(['spectrum', '--nmax', '3', '--output', 'csv']) == main.EXIT_OK
    header, rows = csv_rows(capsys.readouterr().out)
    assert header == 'n,R,e,P'
    assert [row[0] for row in rows] == [1.0, 2.0, 3.0]
    assert rows[2][2] == pytest.approx(3.0, rel=1e-14)


def test_spectrum_json(capsys):
    """Ensures proper function when the spectrum is written as JSON"""
    code, document = run_json(capsys, ['spectrum', '--nmax', '3'])
    assert code == main.EXIT_OK
    assert document['spectrum'][2]['e'] == pytest.approx(3.0, rel=1e-14)
    assert document['meta']['command'] == 'spectrum'
    assert document['run']['family']['kind'] == 'typeD'


def test_state_csv(capsys):
    """Ensures proper function when the Glauber vacuum coefficient is
    exp(-|z|^2/2)"""
    assert main.run(['state', '--z', '0.5,0.3', '--nmax', '10', '--output', 'csv']) == 0
    header, rows = csv_rows(capsys.readouterr().out)
    assert header == 'n,re,im,abs2'
    assert rows[0][3] == pytest.approx(math.exp(-0.34), rel=1e-12)


def test_state_negative_label(capsys):
    """Ensures proper function when the label has a negative real part"""
    for argv in (['--z', '-0.5,0.3'], ['--z=-0.5,0.3']):
        assert main.run(['state', *argv, '--nmax', '10', '--output', 'csv']) == main.EXIT_OK
        _, rows = csv_rows(capsys.readouterr().out)
        assert rows[0][3] == pytest.approx(math.exp(-0.34), rel=1e-12)


def test_attach_signed_values():
    """Ensures proper function when signed values follow their options"""
    argv = ['overlap', '--z', '-1', '--z2', '-.5,0.1', '--output', 'csv']
    expected_argv = ['overlap', '--z=-1', '--z2=-.5,0.1', '--output', 'csv']
    assert main.attach_signed_values(argv) == expected_argv
    assert main.attach_signed_values(['state', '--z', '--nmax', '3']) == [
        'state', '--z', '--nmax', '3'
    ]


def test_coeffs_json(capsys):
    """Ensures proper function when listing orbit products and h_n"""
    code, document = run_json(capsys, ['coeffs', '--nmax', '4'])
    assert code == main.EXIT_OK
    assert len(document['coeffs']) == 5
    assert document['coeffs'][4]['h'][0] == pytest.approx(24.0 ** 0.5, rel=1e-12)


def test_overlap_json(capsys):
    """Ensures proper function when the closed overlap is reported"""
    code, document = run_json(capsys, ['overlap', '--z', '0.3', '--z2', '0.3'])
    assert code == main.EXIT_OK
    assert document['abs'] == pytest.approx(1.0, abs=1e-10)
    assert document['closed'][0] == pytest.approx(1.0, abs=1e-10)


def test_evolve_json(capsys):
    """Ensures proper function when evolution shifts alpha by omega t"""
    code, document = run_json(capsys, ['evolve', '--z', '0.5', '--t', '0.5'])
    assert code == main.EXIT_OK
    assert document['run']['alpha'] == pytest.approx(0.5)
    assert document['state']['alpha'] == pytest.approx(0.5)


def test_action_csv(capsys):
    """Ensures proper function when <H> = J = |z|^2 for the oscillator"""
    assert main.run(['action', '--z', '0.3,0.3', '--output', 'csv']) == main.EXIT_OK
    header, rows = csv_rows(capsys.readouterr().out)
    assert header == 'energy,energy_scalar,action'
    assert rows[0][0] == pytest.approx(0.18, rel=1e-10)
    assert rows[0][2] == pytest.approx(0.18, rel=1e-10)


def test_wavefunction_csv(capsys):
    """Ensures proper function when sampling on an explicit grid"""
    code = main.run(['wavefunction', '--grid=-8:8:256', '--n', '1', '--output', 'csv'])
    assert code == main.EXIT_OK
    header, rows = csv_rows(capsys.readouterr().out)
    assert header == 'x,re,im,abs2'
    assert len(rows) == 256
    assert rows[0][0] == -8.0


def test_output_file(capsys, tmp_path):
    """Ensures proper function when --out redirects the output"""
    path = tmp_path / 'spectrum.json'
    assert main.run(['spectrum', '--nmax', '2', '--out', str(path)]) == main.EXIT_OK
    assert capsys.readouterr().out == ''
    assert len(json.loads(path.read_text())['spectrum']) == 2


def test_config_over_flags(capsys, tmp_path):
    """Ensures proper function when the config wins and flags fill its gaps"""
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'family': {'kind': 'typeD'}, 'z': [0.01, 0.0], 'nmax': 4}))
    argv = ['state', '--config', str(path), '--nmax', '20', '--output', 'csv']
    assert main.run(argv) == main.EXIT_OK
    header, rows = csv_rows(capsys.readouterr().out)
    assert header == 'n,re,im,abs2'
    assert len(rows) == 5


'''Exit Code Tests'''


@pytest.mark.parametrize('argv', [
    ['state', '--z', 'abc'],
    ['transmogrify'],
    ['verify-measure'],
    ['state', '--zfunc', 'ss_R'],
    ['state', '--config', 'no_such_config'],
])
def test_usage_errors(capsys, argv):
    """Ensures proper function when arguments or configs are unusable"""
    assert main.run(argv) == main.EXIT_USAGE
    assert capsys.readouterr().out == ''


def test_help(capsys):
    """Ensures proper function when asking for help"""
    assert main.run(['--help']) == main.EXIT_OK
    assert 'spectrum' in capsys.readouterr().out


def test_divergent_state(capsys):
    """Ensures proper function when z lies outside the disk of convergence"""
    assert main.run(['state', *DISK, '--z', '1.2']) == main.EXIT_NUMERICAL


def test_verify_measure_pass(capsys):
    """Ensures proper function when the oscillator moments match"""
    argv = ['verify-measure', '--case', 'hoflat', '--tol', '1e-6', '--nmoments', '4']
    code, document = run_json(capsys, argv)
    assert code == main.EXIT_OK
    assert len(document['rows']) == 5


def test_verify_measure_missing(capsys):
    """Ensures proper function when moments do not exist"""
    argv = [
        'verify-measure', '--case', 'ramanujan_general_q', '--params', 'q=0.5,c=0.3',
        '--nmoments', '3', '--tol', '1e-5'
    ]
    code, document = run_json(capsys, argv)
    assert code == main.EXIT_VERIFICATION
    assert document['rows'][2]['moment'] is None


def test_report_products(capsys):
    """Ensures proper function when running one report group"""
    code, document = run_json(capsys, ['report', '--only', 'products'])
    assert code == main.EXIT_OK
    assert document['pass'] is True


def test_report_full(capsys):
    """Ensures proper function when the whole acceptance suite passes"""
    code, document = run_json(capsys, ['report'])
    assert code == main.EXIT_OK
    assert document['pass'] is True
    assert all(row['status'] == 'pass' for row in document['criteria'])


'''Logging Tests'''


def test_unknown_log_level(capsys, monkeypatch):
    """Ensures proper function when SIS_LOG is not a known level"""
    monkeypatch.setenv(main.LOG_ENV, 'chatty')
    assert main.run(['spectrum', '--nmax', '1']) == main.EXIT_OK
    captured = capsys.readouterr()
    assert 'Unknown SIS_LOG=chatty' in captured.err
    assert json.loads(captured.out)['spectrum'][0]['n'] == 1


def test_parse_complex():
    """Ensures proper function when parsing complex literals"""
    assert main.parse_complex('1.5') == 1.5
    assert main.parse_complex('0,-2') == -2j
