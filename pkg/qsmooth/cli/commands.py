"""
The work behind each ``qsmooth`` subcommand. Every command takes a validated
RunConfig and an output directory and writes plot-ready CSV files.
"""
import json
import logging
import os

import numpy as np
import pandas as pd
import xarray as xr

from .._version import __version__
from ..attack import AttackConfig, attack_dataset, curve_from_attacks, semantic_check_annular
from ..certify import certificates_to_frame, certify_dataset, curve_from_certificates
from ..model import KernelRidge, forward_batch, gram_matrix, load_checkpoint, save_checkpoint, train
from ..smoothing import Distribution, GaussianDistribution, Smoothing
from .build import (build_classifier, build_datasets, build_encoding, build_smoothing,
                    build_train_config, kernel_grid)
from .config import ConfigError, config_hash
from .output import ResultStore, ensure_dir, write_csv
from .selftest import run_selftest

__all__ = ['cmd_train', 'cmd_certify', 'cmd_attack', 'cmd_kernel', 'cmd_selftest']

log = logging.getLogger(__name__)

CHECKPOINT_NAME = 'checkpoint.json'


def _accuracy(spec, ds, threads):
    y = forward_batch(spec, ds.points, threads=threads)
    return float(np.mean((y > spec.threshold).astype(int) == ds.labels))


def _toplevel(cfg, sha):
    return {'experiment': cfg.experiment.name, 'seed': cfg.experiment.seed,
            'config_sha256': sha, 'qsmooth_version': __version__}


def cmd_train(cfg, out, threads=1):
    """Train the configured model; writes the checkpoint and the loss trace."""
    ensure_dir(out)
    sha = config_hash(cfg)
    train_ds, test_ds = build_datasets(cfg)
    smoothing = build_smoothing(cfg)
    ckpt_path = os.path.join(out, CHECKPOINT_NAME)
    if cfg.model.kind == 'kernel':
        kr = KernelRidge(build_encoding(cfg), smoothing if cfg.train.smoothed else None,
                         ridge=cfg.model.ridge)
        kr.fit(train_ds.points, train_ds.labels, threads=threads)
        log.info('kernel ridge train accuracy %.4f', kr.score(train_ds.points, train_ds.labels))
        spec = kr.to_classifier()
        spec.smoothing = smoothing
        losses = np.zeros(0)
        save_checkpoint(ckpt_path, spec, kind='kernel', kernel=kr, config_sha256=sha)
    else:
        spec = build_classifier(cfg, smoothing)
        spec, losses = train(spec, train_ds, build_train_config(cfg))
        save_checkpoint(ckpt_path, spec, losses, config_sha256=sha)
    frame = pd.DataFrame({'epoch': np.arange(1, losses.size + 1), 'loss': losses})
    write_csv(frame, os.path.join(out, 'losses.csv'), sha)
    acc_train = _accuracy(spec, train_ds, threads)
    acc_test = _accuracy(spec, test_ds, threads)
    log.info('accuracy train %.4f  test %.4f', acc_train, acc_test)
    return {'checkpoint': ckpt_path, 'train_accuracy': acc_train, 'test_accuracy': acc_test}


def _smoothing_for(cfg, spec, sigma):
    if cfg.smoothing.enabled:
        return build_smoothing(cfg, sigma)
    if spec.smoothing is not None:
        return spec.smoothing
    raise ConfigError("Certification needs smoothing, the checkpoint has none and the "
                      "configuration disables it", ["smoothing.enabled"])


def cmd_certify(cfg, checkpoint, out, threads=1):
    """Certify the test split for every sigma of the sweep and every mode."""
    ensure_dir(out)
    sha = config_hash(cfg)
    spec, _ = load_checkpoint(checkpoint)
    _, test_ds = build_datasets(cfg)
    c = cfg.certify
    radii = c.radius_grid()
    sigmas = cfg.smoothing.sweep() if cfg.smoothing.enabled else [None]
    tables, curves = [], []
    for mode in c.modes:
        per_sigma = []
        for sigma in sigmas:
            spec.smoothing = _smoothing_for(cfg, spec, sigma)
            certs = certify_dataset(spec, test_ds, mode, c.alpha, c.shots, cfg.experiment.seed,
                                    c.formula, threads)
            table = certificates_to_frame(certs)
            table.insert(0, 'sigma', spec.smoothing.sigma)
            tables.append(table)
            curve = curve_from_certificates(certs, radii)
            per_sigma.append(curve.expand_dims(sigma=[spec.smoothing.sigma]))
        curves.append(xr.concat(per_sigma, dim='sigma').expand_dims(mode=[mode]))
    ds = xr.concat(curves, dim='mode')
    ds.attrs = {'strategy': spec.smoothing.strategy, 'n_points': len(test_ds)}
    write_csv(pd.concat(tables, ignore_index=True), os.path.join(out, 'certificates.csv'), sha)
    frame = ds.to_dataframe().reset_index()[['mode', 'sigma', 'radius', 'certified_ratio',
                                             'certified_accuracy']]
    write_csv(frame, os.path.join(out, 'curves.csv'), sha)
    store = ResultStore(os.path.join(out, 'curves.%s' % cfg.output.format))
    store.set_toplevel(_toplevel(cfg, sha))
    store.set_group('curves', ds)
    return ds


def cmd_attack(cfg, checkpoint, out, threads=1):
    """PGD attacks on the test split over the epsilon grid."""
    ensure_dir(out)
    sha = config_hash(cfg)
    spec, _ = load_checkpoint(checkpoint)
    _, test_ds = build_datasets(cfg)
    if cfg.smoothing.enabled:
        spec.smoothing = build_smoothing(cfg)
    a = cfg.attack
    acfg = AttackConfig(0.0, a.steps, a.step_size, a.restarts, cfg.experiment.seed, a.h)
    semantic = semantic_check_annular if a.semantic else None
    table = attack_dataset(spec, test_ds, a.epsilons, acfg, semantic, threads)
    curve = curve_from_attacks(table)
    dist = None if spec.smoothing is None else spec.smoothing.distribution
    if isinstance(dist, GaussianDistribution) and dist.sigma > 0:
        certs = certify_dataset(spec, test_ds, 'exact', cfg.certify.alpha, cfg.certify.shots,
                                cfg.experiment.seed, cfg.certify.formula, threads)
        certified = curve_from_certificates(certs, curve.epsilon.values)
        curve['certified_accuracy'] = ('epsilon', certified.certified_accuracy.values)
        curve['gap'] = curve.accuracy - curve.certified_accuracy
    write_csv(table, os.path.join(out, 'attacks.csv'), sha)
    write_csv(curve.to_dataframe().reset_index(), os.path.join(out, 'attack_curve.csv'), sha)
    store = ResultStore(os.path.join(out, 'attack.%s' % cfg.output.format))
    store.set_toplevel(_toplevel(cfg, sha))
    store.set_group('attack', curve)
    return curve


def _rescale(k):
    lo, hi = np.min(k), np.max(k)
    if hi - lo <= 1e-15:
        return np.ones_like(k)
    return (k - lo) / (hi - lo)


def cmd_kernel(cfg, out, threads=1):
    """Kernel values around the configured centre, without and with smoothing."""
    ensure_dir(out)
    sha = config_hash(cfg)
    encoding = build_encoding(cfg)
    grid, points, center = kernel_grid(cfg)
    dist = Distribution('gaussian', sigma=cfg.kernel.sigma)
    columns = {}
    for name, smoothing in (('k_unsmoothed', None),
                            ('k_exponential', Smoothing(dist, 'exponential')),
                            ('k_uniform', Smoothing(dist, 'uniform'))):
        k = gram_matrix(encoding, points, center[None, :], smoothing, threads)[:, 0]
        columns[name] = _rescale(k)
    frame = pd.DataFrame(grid, columns=['x'] if grid.shape[1] == 1 else ['x0', 'x1'])
    for name, values in columns.items():
        frame[name] = values
    write_csv(frame, os.path.join(out, 'kernel.csv'), sha)
    return frame


def cmd_selftest(out=None, seed=0):
    """Run the built-in checks; writes ``selftest.json`` when ``out`` is given."""
    report = run_selftest(seed)
    if out is not None:
        ensure_dir(out)
        with open(os.path.join(out, 'selftest.json'), 'w') as f:
            json.dump(report.model_dump(), f, indent=1)
    return report
