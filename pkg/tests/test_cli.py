import io
import json
import logging
import math
import numpy as np
import pytest
import sys
from os import path as osp

import helixrec
from helixrec.cli import RunConfig, build_parser, main
from helixrec.errors import ConfigError
from helixrec.sample_io import read_sample, write_sample
from helixrec.utils import DEFAULT_OPTION_FILE, DEFAULT_OPTIONS, load_options, read_option_file

EXAMPLE_ARGS = {
    'plane': ['--kappa', 's/a^2', '--tau', '0', '-p', 'a=1', '--s0', '0.5', '--s1', '3'],
    'circular': ['--kappa', 'sin(alpha)/a', '--tau', 'cos(alpha)/a', '-p', 'a=2', '-p', 'alpha=pi/3', '--s0', '0',
                 '--s1', '10'],
    'conical': ['--kappa', 'sin(alpha)/(a*s)', '--tau', 'cos(alpha)/(a*s)', '-p', 'a=1', '-p', 'alpha=pi/4', '--s0',
                '1', '--s1', '5'],
    'catenary': ['--kappa', 'a*sin(alpha)/(a^2+s^2)', '--tau', 'a*cos(alpha)/(a^2+s^2)', '-p', 'a=1', '-p',
                 'alpha=pi/3', '--s0', '-2', '--s1', '2'],
}


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.mark.parametrize('kappa, tau, expected', [
    ('2/(1+s^2)', '2/(1+s^2)', 'GeneralHelix'),
    ('1', '1', 'CircularHelix'),
    ('1', 'exp(s)', 'Generic'),
    ('1', '0', 'Planar'),
])
def test_classify(kappa, tau, expected, capsys):
    assert main(['classify', '--kappa', kappa, '--tau', tau, '--s0', '0', '--s1', '3']) == 0
    out = capsys.readouterr().out.strip()
    assert out.split('(')[0] == expected
    if expected == 'GeneralHelix':
        assert float(out.split('alpha=')[1].rstrip(')')) == pytest.approx(math.pi / 4, abs=1e-12)


def test_reconstruct_circular(workdir, capsys):
    code = main(['reconstruct', '--kappa', 'sin(pi/3)/2', '--tau', 'cos(pi/3)/2', '--s0', '0', '--s1', '10'])
    assert code == 0
    out = capsys.readouterr().out
    assert 'class=CircularHelix' in out
    assert 'alpha=1.0471975512 ' in out
    assert 'method=helix-closed-form' in out
    assert 'points=1001' in out
    sample = read_sample(str(workdir / 'curve.csv'))
    assert len(sample) == 1001
    assert sample.h == pytest.approx(0.01)
    assert sample.alpha == pytest.approx(math.pi / 3)


def test_reconstruct_planar(workdir):
    assert main(['reconstruct', '--kappa', '1', '--tau', '0', '--s0', '0', '--s1', '6', '-o', 'flat.csv']) == 0
    sample = read_sample(str(workdir / 'flat.csv'))
    assert np.all(sample.psi[:, 2] == sample.psi[0, 2])


def test_reconstruct_generic_uses_frenet(workdir, capsys):
    assert main(['reconstruct', '--kappa', '1', '--tau', 's', '--s0', '0', '--s1', '3', '--n', '301']) == 0
    out = capsys.readouterr().out
    assert 'class=Generic alpha=none method=frenet points=301' in out
    assert read_sample(str(workdir / 'curve.csv')).alpha is None


def test_helix_method_rejects_generic_profile():
    assert main(['reconstruct', '--kappa', '1', '--tau', 's', '--s0', '0', '--s1', '3', '--method', 'helix']) == 2


@pytest.mark.parametrize('kind', sorted(EXAMPLE_ARGS))
def test_reconstruct_then_verify(kind, workdir, capsys):
    assert main(['reconstruct'] + EXAMPLE_ARGS[kind] + ['-o', f'{kind}.csv']) == 0
    capsys.readouterr()
    assert main(['verify', f'{kind}.csv']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['passed'] is True
    assert report['stencil_order'] == 4


def test_frenet_method_then_verify(workdir):
    assert main(['reconstruct'] + EXAMPLE_ARGS['conical'] + ['--method', 'frenet', '--n', '2001']) == 0
    assert read_sample('curve.csv').method.value == 'frenet'
    assert main(['verify', 'curve.csv', '--report', 'report.json']) == 0
    assert json.loads((workdir / 'report.json').read_text())['passed'] is True


def test_verify_flags_corrupted_sample(workdir):
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular']) == 0
    sample = read_sample('curve.csv')
    noise = 1e-3 * np.random.default_rng(11).standard_normal(sample.psi.shape)
    write_sample(sample.replace(psi=sample.psi + noise), 'noisy.csv')
    assert main(['verify', 'noisy.csv']) == 1


def test_verify_flags_quadratic_drift(workdir, capsys):
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular']) == 0
    sample = read_sample('curve.csv')
    drift = np.zeros_like(sample.psi)
    drift[:, 0] = 1e-3 * sample.s**2
    write_sample(sample.replace(psi=sample.psi + drift), 'drifted.csv')
    capsys.readouterr()
    assert main(['verify', 'curve.csv']) == 0
    clean = json.loads(capsys.readouterr().out)
    assert main(['verify', 'drifted.csv']) == 1
    report = json.loads(capsys.readouterr().out)
    assert 'ode4' in [failure['check'] for failure in report['failures']]
    assert report['ode4_residual'] >= 10 * clean['ode4_residual']


def test_log_handlers_do_not_outlive_the_run(workdir, monkeypatch, capsys):
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular']) == 0
    (workdir / 'strict.yml').write_text('verify:\n  ode4_tol: !!float 1e-12\n')
    stream = io.StringIO()
    with monkeypatch.context() as patch:
        patch.setattr(sys, 'stderr', stream)
        assert main(['verify', 'curve.csv', '--config', 'strict.yml', '--log-file', 'run.log']) == 1
    assert 'ode4 failed' in stream.getvalue()
    assert 'ode4 failed' in (workdir / 'run.log').read_text()
    stream.close()
    capsys.readouterr()
    logging.getLogger('helixrec.verify').warning('after the run')
    assert 'Logging error' not in capsys.readouterr().err


def test_verify_rejects_reversed_rows(workdir):
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular']) == 0
    lines = (workdir / 'curve.csv').read_text().splitlines()
    (workdir / 'reversed.csv').write_text('\n'.join(lines[:2] + lines[:1:-1]) + '\n')
    assert main(['verify', 'reversed.csv']) == 2


def test_verify_rejects_missing_header(workdir):
    (workdir / 'bare.csv').write_text('s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz\n')
    assert main(['verify', 'bare.csv']) == 2
    assert main(['verify', 'absent.csv']) == 2


def test_example_command(workdir, capsys):
    assert main(['example', 'circular', '--a', '2', '--alpha', 'pi/3']) == 0
    assert 'example=circular points=1001 output=circular.csv' in capsys.readouterr().out
    header = (workdir / 'circular.csv').read_text().splitlines()[0]
    assert header.startswith('# profile: kappa=sin(alpha)/a tau=cos(alpha)/a params=a=2,alpha=1.0471975511965976')
    assert 'method=example' in header
    assert main(['verify', 'circular.csv']) == 0


def test_example_domains():
    assert main(['example', 'conical', '--a', '1', '--alpha', 'pi/4', '--s0', '1', '--s1', '5']) == 0
    assert read_sample('conical.csv').s[0] == 1.0
    assert main(['example', 'conical', '--a', '1', '--alpha', 'pi/4', '--s0', '0']) == 2
    assert main(['example', 'circular', '--a', '2']) == 2
    assert main(['example', 'plane', '--a', '1', '--s0', '-1']) == 2


def test_output_is_deterministic(workdir):
    args = ['reconstruct'] + EXAMPLE_ARGS['catenary']
    assert main(args + ['-o', 'first.csv']) == 0
    assert main(args + ['-o', 'second.csv']) == 0
    assert (workdir / 'first.csv').read_bytes() == (workdir / 'second.csv').read_bytes()


def test_json_output_then_verify(workdir):
    assert main(['reconstruct'] + EXAMPLE_ARGS['catenary'] + ['-o', 'curve.json']) == 0
    document = json.loads((workdir / 'curve.json').read_text())
    assert document['method'] == 'helix-quadrature'
    assert len(document['rows']) == 1001
    assert main(['verify', 'curve.json']) == 0


def test_config_file_tightens_tolerances(workdir):
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular']) == 0
    (workdir / 'strict.yml').write_text('verify:\n  ode4_tol: !!float 1e-12\n')
    assert main(['verify', 'curve.csv', '--config', 'strict.yml']) == 1
    (workdir / 'broken.yml').write_text('- not\n- a mapping\n')
    assert main(['verify', 'curve.csv', '--config', 'broken.yml']) == 2


@pytest.mark.parametrize('args', [
    ['--kappa', 'sin(', '--tau', '0', '--s0', '0', '--s1', '1'],
    ['--kappa', '1', '--tau', '0', '--s0', '1', '--s1', '0'],
    ['--kappa', '1', '--s0', '0', '--s1', '1'],
    ['--kappa', '1', '--tau', '0'],
    ['--kappa', 'a*s', '--tau', '0', '--s0', '1', '--s1', '2'],
    ['--kappa', '1', '--tau', '0', '--s0', '0', '--s1', '1', '-p', 'alpha'],
])
def test_usage_errors(args):
    assert main(['reconstruct'] + args) == 2


def test_too_short_sample_exit_code():
    assert main(['reconstruct'] + EXAMPLE_ARGS['circular'] + ['--n', '5']) == 0
    assert main(['verify', 'curve.csv']) == 3


def test_table_profile(workdir):
    s = np.linspace(0, 3, 31)
    rows = [f'{v:.17g},{1 + v**2 / 8:.17g},{1 + v**2 / 8:.17g}' for v in s]
    (workdir / 'profile.csv').write_text('\n'.join(['s,kappa,tau'] + rows) + '\n')
    assert main(['reconstruct', '--table', str(workdir / 'profile.csv'), '-o', 'tabled.csv']) == 0
    header = (workdir / 'tabled.csv').read_text().splitlines()[0]
    assert f'kappa=table:{workdir / "profile.csv"}#kappa' in header
    assert main(['verify', 'tabled.csv']) == 0


def test_argparse_surface():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(['example', 'spherical'])
    args = parser.parse_args(['classify', '--kappa', '1', '--tau', '1', '--s0', '0', '--s1', '1', '--tol', '1e-6'])
    config = RunConfig.from_args(args)
    assert config.options['classify']['tol'] == 1e-6
    assert config.options['verify']['ode4_stride'] == 10
    with pytest.raises(ConfigError):
        RunConfig(command='reconstruct', kappa='1', tau='1', s0=0.0, s1=1.0, n=1).validate()


def test_defaults_come_from_shipped_option_file():
    path = osp.join(osp.dirname(osp.dirname(osp.abspath(__file__))), 'options', 'defaults.yml')
    assert osp.samefile(DEFAULT_OPTION_FILE, path)
    assert read_option_file(path) == DEFAULT_OPTIONS
    assert DEFAULT_OPTIONS['verify']['ode4_tol'] == 1e-3
    options = load_options()
    options['verify']['ode4_tol'] = 1.0
    assert DEFAULT_OPTIONS['verify']['ode4_tol'] == 1e-3


def test_package_namespace_holds_no_module_imports():
    for name in ('copy', 'logging', 'math', 'np', 'yaml', 'osp'):
        assert not hasattr(helixrec, name), name
    assert helixrec.load_options is load_options
    assert 'DEFAULT_OPTIONS' in dir(helixrec)
