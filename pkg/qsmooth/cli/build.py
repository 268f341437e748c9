"""
Turn a validated RunConfig into datasets, encodings and classifiers.
"""
import numpy as np

from ..data import annular, mnist_binary, split, two_moons
from ..encoding import EncodingLayer, EncodingSpec, exponential_layer, linear_layer
from ..model import Ansatz, ClassifierSpec, LinearFrontEnd, TrainConfig, parity_povm, qubit_povm
from ..smoothing import Distribution, Smoothing

__all__ = ['build_datasets', 'build_encoding', 'build_smoothing', 'build_classifier',
           'build_train_config', 'kernel_grid']


def build_datasets(cfg):
    """(train, test) datasets of the run."""
    d = cfg.dataset
    seed = cfg.experiment.seed if d.seed is None else d.seed
    if d.kind == 'two_moons':
        ds = two_moons(d.n, d.noise, seed)
    elif d.kind == 'annular':
        ds = annular(d.n, d.box, seed)
    else:
        ds = mnist_binary(d.images, d.labels, d.digits, d.per_class, seed)
    return split(ds, d.train_fraction, seed)


def _layer(lc, n_qubits):
    if lc.type == 'exponential':
        return exponential_layer(lc.n, lc.feature, lc.first_qubit, n_qubits, lc.axis, lc.scale)
    if lc.type == 'linear':
        return linear_layer(lc.qubits, lc.feature, n_qubits, lc.axis, lc.scale)
    return EncodingLayer(eigenvalues=lc.eigenvalues, feature=lc.feature, scale=lc.scale)


def build_encoding(cfg):
    m = cfg.model
    return EncodingSpec(m.qubits, [_layer(lc, m.qubits) for lc in m.layers], slots=m.slots,
                        initial_state=m.initial_state)


def build_smoothing(cfg, sigma=None, strategy=None):
    """Smoothing of the run, or None when disabled; ``sigma``/``strategy`` override."""
    s = cfg.smoothing
    if not s.enabled:
        return None
    return Smoothing(Distribution(s.distribution, sigma=s.sigma if sigma is None else sigma),
                     s.strategy if strategy is None else strategy)


def build_classifier(cfg, smoothing=None):
    """Untrained variational classifier of the run."""
    m = cfg.model
    seed = cfg.experiment.seed
    encoding = build_encoding(cfg)
    ansatz = Ansatz(m.qubits, m.blocks, m.reps)
    povm = parity_povm(m.qubits) if m.povm == 'parity' else qubit_povm(m.qubits - 1, m.qubits)
    frontend = None
    if m.frontend is not None:
        frontend = LinearFrontEnd.random(m.frontend.in_dim, m.frontend.out_dim, seed,
                                         m.frontend.scale)
    return ClassifierSpec(encoding, ansatz, povm=povm, smoothing=smoothing, frontend=frontend,
                          seed=seed)


def build_train_config(cfg):
    t = cfg.train
    return TrainConfig(t.learning_rate, t.epochs, t.batch_size, cfg.experiment.seed, t.gradient,
                       t.h, t.smoothed)


def kernel_grid(cfg):
    """Evaluation points and centre of the kernel export."""
    k = cfg.kernel
    axis = np.linspace(k.grid_min, k.grid_max, k.points)
    if k.dims == 1:
        grid = axis[:, None]
    else:
        g0, g1 = np.meshgrid(axis, axis, indexing='ij')
        grid = np.column_stack([g0.ravel(), g1.ravel()])
    n_feat = cfg.n_features() or k.dims
    center = np.zeros(n_feat) if k.center is None else np.asarray(k.center, dtype=float)
    points = np.tile(center, (len(grid), 1))
    points[:, :k.dims] = grid
    return grid, points, center
