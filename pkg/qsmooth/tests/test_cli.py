import json
import os

import netCDF4
import numpy as np
import pandas as pd
import pytest
import xarray as xr
from click.testing import CliRunner
from scipy.stats import norm

import qsmooth.cli.selftest as selftest_module
from qsmooth import __version__
from qsmooth.cli import (ConfigError, RunConfig, cli, cmd_certify, cmd_kernel, config_hash,
                         load_config, run_selftest)
from qsmooth.cli.build import build_classifier, build_datasets, build_encoding, kernel_grid
from qsmooth.cli.main import EXIT_OK, EXIT_RUNTIME, EXIT_SELFTEST, EXIT_USAGE, main
from qsmooth.cli.output import ResultStore, write_csv

config_dir = './configs'


def _tiny(out_dir, **blocks):
    raw = {
        'experiment': {'name': 'tiny', 'seed': 1},
        'dataset': {'kind': 'two_moons', 'n': 20, 'train_fraction': 0.5},
        'model': {'qubits': 2,
                  'layers': [{'type': 'exponential', 'n': 2, 'feature': 0},
                             {'type': 'exponential', 'n': 2, 'feature': 1}],
                  'initial_state': 'plus',
                  'blocks': [['two_local'], ['two_local'], ['real_amplitudes']]},
        'smoothing': {'sigma': 0.3, 'sigmas': [0.2, 0.4]},
        'train': {'epochs': 2, 'batch_size': 5},
        'certify': {'modes': ['exact', 'shots'], 'shots': 200, 'radius_points': 5},
        'attack': {'epsilons': [0.0, 0.1], 'steps': 3},
        'kernel': {'points': 5, 'sigma': 0.0},
        'output': {'dir': str(out_dir)},
    }
    for key, value in blocks.items():
        raw[key].update(value)
    return raw


def _write(tmp_path, raw, name='run.json'):
    path = str(tmp_path / name)
    with open(path, 'w') as f:
        json.dump(raw, f)
    return path


def _config_error(tmp_path, raw):
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, raw))
    return err.value


@pytest.mark.parametrize('name', ['two_moons.json', 'annular.json', 'mnist.json'])
def test_shipped_configs(name):
    cfg = load_config(os.path.join(config_dir, name))
    assert isinstance(cfg, RunConfig)
    assert build_encoding(cfg).n_qubits == cfg.model.qubits


def test_mnist_config_matches_fetch_instructions():
    cfg = load_config(os.path.join(config_dir, 'mnist.json'))
    assert cfg.dataset.images == 'data/train-images-idx3-ubyte.gz'
    assert cfg.dataset.labels == 'data/train-labels-idx1-ubyte.gz'
    with open('./docs/source/usage.rst') as f:
        usage = f.read()
    for path in (cfg.dataset.images, cfg.dataset.labels):
        assert os.path.basename(path) in usage


def test_config_errors(tmp_path):
    raw = _tiny(tmp_path)
    raw['model']['colour'] = 'red'
    assert 'model.colour' in _config_error(tmp_path, raw).paths

    raw = _tiny(tmp_path)
    raw['model']['layers'][1]['feature'] = 2
    assert _config_error(tmp_path, raw).paths == ['model.layers.1.feature']

    raw = _tiny(tmp_path)
    raw['model']['blocks'] = [['two_local']]
    assert _config_error(tmp_path, raw).paths == ['model.blocks']

    raw = _tiny(tmp_path)
    del raw['model']['layers'][0]['n']
    assert 'model.layers.0' in _config_error(tmp_path, raw).paths

    raw = _tiny(tmp_path, smoothing={'sigmas': [0.2, -0.1]})
    assert 'smoothing.sigmas' in _config_error(tmp_path, raw).paths

    raw = _tiny(tmp_path, dataset={'kind': 'mnist'})
    paths = _config_error(tmp_path, raw).paths
    assert {'model.frontend', 'dataset.images', 'dataset.labels'} <= set(paths)


def test_config_not_json(tmp_path):
    path = str(tmp_path / 'broken.json')
    with open(path, 'w') as f:
        f.write('{"experiment": ')
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / 'missing.json'))


def test_config_hash(tmp_path):
    a = load_config(_write(tmp_path, _tiny(tmp_path), 'a.json'))
    b = load_config(_write(tmp_path, _tiny(tmp_path), 'b.json'))
    assert config_hash(a) == config_hash(b)
    assert len(config_hash(a)) == 64
    b.experiment.seed = 2
    assert config_hash(a) != config_hash(b)


def test_build(tmp_path):
    cfg = load_config(_write(tmp_path, _tiny(tmp_path)))
    train, test = build_datasets(cfg)
    assert (len(train), len(test)) == (10, 10)
    spec = build_classifier(cfg)
    assert spec.theta.size == spec.ansatz.n_params
    grid, points, center = kernel_grid(cfg)
    assert grid.shape == (5, 1) and points.shape == (5, 2)
    assert np.allclose(points[:, 1], 0)
    assert np.allclose(center, 0)


def test_write_csv_header(tmp_path):
    path = write_csv(pd.DataFrame({'a': [1, 2]}), str(tmp_path / 'out.csv'), 'abc')
    with open(path) as f:
        assert f.readline().strip() == '# config_sha256=abc qsmooth=%s' % __version__
    assert pd.read_csv(path, comment='#').a.tolist() == [1, 2]


@pytest.mark.parametrize('ext', ['.nc', '.zarr'])
def test_result_store(tmp_path, ext):
    path = str(tmp_path / ('result' + ext))
    store = ResultStore(path)
    store.set_toplevel({'experiment': 'tiny', 'seed': 3})
    ds = xr.Dataset({'accuracy': (['epsilon'], [1.0, 0.5])}, coords={'epsilon': [0.0, 0.1]})
    store.set_group('attack', ds)
    if ext == '.nc':
        back = xr.open_dataset(path, group='attack')
    else:
        back = xr.open_zarr(path, group='attack')
    assert np.allclose(back.accuracy.values, [1.0, 0.5])
    back.close()
    with pytest.raises(ValueError):
        ResultStore(str(tmp_path / 'result.h5'))


def test_kernel_zero_sigma(tmp_path):
    cfg = load_config(_write(tmp_path, _tiny(tmp_path)))
    frame = cmd_kernel(cfg, str(tmp_path / 'kernel'))
    assert list(frame.columns) == ['x', 'k_unsmoothed', 'k_exponential', 'k_uniform']
    assert np.allclose(frame.k_unsmoothed, frame.k_exponential)
    assert np.allclose(frame.k_unsmoothed, frame.k_uniform)
    # the middle grid point is the centre, where the kernel peaks
    assert frame.x[2] == pytest.approx(0.0)
    assert frame.k_unsmoothed[2] == pytest.approx(1.0)
    assert os.path.isfile(str(tmp_path / 'kernel' / 'kernel.csv'))


def test_run_selftest():
    report = run_selftest(seed=0)
    assert report.passed
    assert [c.id for c in report.checks] == [c for c, _, _ in selftest_module.CHECKS]
    tagged = [c.theorem for c in report.checks if c.theorem is not None]
    assert tagged == ['Thm1a', 'Thm1b', 'Thm2', 'Thm3a', 'Thm3b', 'Thm4', 'Lemma1', 'Cor1',
                      'Cor2']
    assert report.model_dump()['checks'][0]['theorem'] == 'Thm1a'
    checks = [('raises', None, lambda rng: 1 / 0), ('fails', None, lambda rng: (False, 'no'))]
    report = run_selftest(checks=checks)
    assert not report.passed
    assert report.checks[0].detail.startswith('raised ZeroDivisionError')


def test_selftest_catches_flipped_quantile(monkeypatch):
    monkeypatch.setattr(selftest_module, 'std_normal_quantile', lambda p: -norm.ppf(p))
    report = run_selftest(seed=0)
    failed = [c.id for c in report.checks if not c.passed]
    assert 'normal_quantile' in failed
    assert not report.passed


def test_main_selftest(tmp_path, monkeypatch):
    out = str(tmp_path / 'st')
    assert main(['selftest', '--out', out]) == EXIT_OK
    with open(os.path.join(out, 'selftest.json')) as f:
        assert json.load(f)['passed']
    monkeypatch.setattr(selftest_module, 'CHECKS', [('fails', None, lambda rng: (False, 'no'))])
    assert main(['selftest']) == EXIT_SELFTEST


def test_main_exit_codes(tmp_path):
    assert main(['train', '--config', str(tmp_path / 'missing.json')]) == EXIT_USAGE
    assert main(['frobnicate']) == EXIT_USAGE
    raw = _tiny(tmp_path)
    raw['model']['blocks'] = []
    assert main(['train', '--config', _write(tmp_path, raw)]) == EXIT_USAGE
    config = _write(tmp_path, _tiny(tmp_path / 'out'), 'good.json')
    checkpoint = str(tmp_path / 'corrupt.json')
    with open(checkpoint, 'w') as f:
        f.write('not json')
    assert main(['certify', '--config', config, '--checkpoint', checkpoint]) == EXIT_RUNTIME


def test_main_pipeline(tmp_path):
    out = str(tmp_path / 'out')
    raw = _tiny(out)
    config = _write(tmp_path, raw)
    sha = config_hash(load_config(config))
    assert main(['train', '--config', config]) == EXIT_OK
    assert os.path.isfile(os.path.join(out, 'checkpoint.json'))
    losses = pd.read_csv(os.path.join(out, 'losses.csv'), comment='#')
    assert list(losses.epoch) == [1, 2]

    assert main(['certify', '--config', config, '--threads', '2']) == EXIT_OK
    curves = pd.read_csv(os.path.join(out, 'curves.csv'), comment='#')
    assert len(curves) == 2 * 2 * 5
    assert set(curves['mode']) == {'exact', 'shots'}
    certs = pd.read_csv(os.path.join(out, 'certificates.csv'), comment='#')
    assert len(certs) == 2 * 2 * 10
    with netCDF4.Dataset(os.path.join(out, 'curves.nc')) as nc:
        assert nc.getncattr('config_sha256') == sha
        assert nc.getncattr('qsmooth_version') == __version__
    ds = xr.open_dataset(os.path.join(out, 'curves.nc'), group='curves')
    assert ds.certified_accuracy.dims == ('mode', 'sigma', 'radius')
    assert np.all(ds.certified_accuracy.values <= ds.certified_ratio.values + 1e-12)
    ds.close()

    assert main(['attack', '--config', config]) == EXIT_OK
    curve = pd.read_csv(os.path.join(out, 'attack_curve.csv'), comment='#')
    assert list(curve.epsilon) == [0.0, 0.1]
    assert np.all(curve.gap >= -1e-12)


def test_cli_help():
    runner = CliRunner()
    result = runner.invoke(cli, ['--help'])
    assert result.exit_code == 0
    for command in ('train', 'certify', 'attack', 'kernel', 'selftest'):
        assert command in result.output
    result = runner.invoke(cli, ['certify', '--help'])
    assert result.exit_code == 0
    assert '--checkpoint' in result.output and '--threads' in result.output


def test_certify_needs_smoothing(tmp_path):
    out = tmp_path / 'out'
    raw = _tiny(out, smoothing={'enabled': False}, train={'epochs': 0})
    config = _write(tmp_path, raw)
    assert main(['train', '--config', config]) == EXIT_OK
    # neither the checkpoint nor the configuration provides smoothing
    assert main(['certify', '--config', config]) == EXIT_USAGE
    with pytest.raises(ConfigError) as err:
        cmd_certify(load_config(config), str(out / 'checkpoint.json'), str(out))
    assert err.value.paths == ['smoothing.enabled']
