"""
Variational quantum classifier y(x) = Tr(Pi E(rho(x))): forward evaluation,
POVMs, loss, gradients and mini-batch training.
"""
import logging

import dask
import numpy as np

from ..encoding import EncodingSpec, evolve, slot_unitaries
from ..numerics import check_hermitian
from ..smoothing import Smoothing, as_smoothing
from .ansatz import Ansatz
from .frontend import LinearFrontEnd, frontend_forward

__all__ = ['ClassifierSpec', 'TrainConfig', 'parity_povm', 'qubit_povm', 'check_povm', 'forward',
           'forward_batch', 'predict', 'eta', 'bce_loss', 'output_gradient', 'gradient',
           'feature_gradient', 'input_gradient', 'train', 'noise_weights', 'GRADIENT_MODES']

log = logging.getLogger(__name__)

POVM_TOL = 1e-10
PROB_CLAMP = 1e-9
GRADIENT_MODES = ('parameter_shift', 'finite_difference')


def parity_povm(n_qubits):
    """Projector onto computational basis states with an odd number of ones."""
    if n_qubits < 1:
        raise ValueError(f"Parity needs at least one qubit, got {n_qubits}")
    idx = np.arange(2 ** n_qubits)
    odd = np.array([bin(i).count('1') % 2 for i in idx], dtype=float)
    return np.diag(odd)


def qubit_povm(qubit, n_qubits):
    """Projector onto |1> of a single qubit (qubit 0 is the most significant bit)."""
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"Qubit {qubit} is outside a {n_qubits}-qubit register")
    idx = np.arange(2 ** n_qubits)
    return np.diag(((idx >> (n_qubits - 1 - qubit)) & 1).astype(float))


def check_povm(povm, tol=POVM_TOL):
    """Return ``povm`` as a Hermitian matrix after checking 0 <= Pi <= I."""
    p = check_hermitian(povm, tol=tol, name='POVM element')
    w = np.linalg.eigvalsh(p)
    if w[0] < -tol or w[-1] > 1 + tol:
        raise ValueError(f"POVM element eigenvalues must lie in [0, 1], "
                         f"got [{w[0]:.3e}, {w[-1]:.3e}]")
    return p


class ClassifierSpec(object):
    """Everything needed to evaluate the classifier.

    Parameters
    ----------
    encoding : EncodingSpec
    ansatz : Ansatz, optional
        variational blocks, one per encoding slot; identities when omitted
    theta : array_like, optional
        flat parameter vector, default ``ansatz.init_params(seed)``
    povm : array_like, optional
        measured effect, default parity over the whole register
    smoothing : Smoothing or SmoothingDistribution, optional
        smoothing applied after each encoding layer
    frontend : LinearFrontEnd, optional
        classical map applied to raw inputs before encoding
    threshold : float
        class 1 is predicted when the output exceeds it
    """

    def __init__(self, encoding, ansatz=None, theta=None, povm=None, smoothing=None,
                 frontend=None, threshold=0.5, seed=0):
        self._channels = None
        self.encoding = encoding
        self.ansatz = ansatz
        if ansatz is not None and theta is None:
            theta = ansatz.init_params(seed)
        self.theta = theta
        self.povm = parity_povm(encoding.n_qubits) if povm is None else povm
        self.smoothing = smoothing
        self.frontend = frontend
        self.threshold = threshold

    @property
    def encoding(self):
        return self._encoding

    @encoding.setter
    def encoding(self, enc):
        if not isinstance(enc, EncodingSpec):
            raise ValueError(f"Expected an EncodingSpec, got {type(enc).__name__}")
        self._encoding = enc
        self._channels = None

    @property
    def ansatz(self):
        return self._ansatz

    @ansatz.setter
    def ansatz(self, ansatz):
        if ansatz is not None:
            if ansatz.n_qubits != self._encoding.n_qubits:
                raise ValueError(f"Ansatz acts on {ansatz.n_qubits} qubits, encoding on "
                                 f"{self._encoding.n_qubits}")
            if ansatz.n_slots != len(self._encoding.slots):
                raise ValueError(f"Ansatz fills {ansatz.n_slots} slots, encoding has "
                                 f"{len(self._encoding.slots)}")
        self._ansatz = ansatz

    @property
    def theta(self):
        return self._theta

    @theta.setter
    def theta(self, theta):
        n = 0 if self._ansatz is None else self._ansatz.n_params
        theta = np.zeros(0) if theta is None else np.array(theta, dtype=float).ravel()
        if theta.size != n:
            raise ValueError(f"Parameter vector has {theta.size} entries, ansatz needs {n}")
        self._theta = theta

    @property
    def povm(self):
        return self._povm

    @povm.setter
    def povm(self, povm):
        p = check_povm(povm)
        if p.shape[0] != self._encoding.dim:
            raise ValueError(f"POVM has dimension {p.shape[0]}, register has {self._encoding.dim}")
        self._povm = p

    @property
    def smoothing(self):
        return self._smoothing

    @smoothing.setter
    def smoothing(self, smoothing):
        self._smoothing = None if smoothing is None else as_smoothing(smoothing)
        self._channels = None

    @property
    def frontend(self):
        return self._frontend

    @frontend.setter
    def frontend(self, fe):
        if fe is not None and not isinstance(fe, LinearFrontEnd):
            raise ValueError(f"Expected a LinearFrontEnd, got {type(fe).__name__}")
        self._frontend = fe

    @property
    def threshold(self):
        return self._threshold

    @threshold.setter
    def threshold(self, t):
        t = float(t)
        if not 0 < t < 1:
            raise ValueError(f"Decision threshold must lie in (0, 1), got {t}")
        self._threshold = t

    @property
    def n_qubits(self):
        return self._encoding.n_qubits

    @property
    def has_data_dependent_smoothing(self):
        return self._smoothing is not None and any(layer.is_product
                                                   for layer in self._encoding.layers)

    def features(self, x):
        """Encoded feature vector: the front-end output, or ``x`` itself."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self._frontend is not None:
            return frontend_forward(self._frontend, x)
        return x

    def variational(self, theta=None):
        if self._ansatz is None:
            return None
        return self._ansatz.unitaries(self._theta if theta is None else theta)

    def channels(self, v):
        """Smoothing channels after each layer at encoded features ``v``."""
        if self._smoothing is None:
            return None
        if self.has_data_dependent_smoothing:
            return self._smoothing.channels(self._encoding, v)
        # rebuilt when the strategy or the law was changed in place
        dist, settings = self._smoothing.distribution, self._smoothing.to_dict()
        cached = self._channels
        if cached is None or cached[0] is not dist or cached[1] != settings:
            cached = (dist, settings, self._smoothing.channels(self._encoding))
            self._channels = cached
        return cached[2]

    def expectation(self, v, smoothed=True, unitaries=None, phases=None):
        """Re Tr(Pi rho) at encoded features ``v`` without clipping.

        ``unitaries`` (slot -> matrix) and ``phases`` (per-layer diagonals, possibly
        batched) override the ones derived from ``theta`` and ``v``.
        """
        if unitaries is None:
            unitaries = slot_unitaries(self._encoding, self.variational())
        channels = self.channels(v) if smoothed else None
        rho = evolve(self._encoding, v, unitaries, channels=channels, phases=phases)
        return np.real(np.einsum('ij,...ji->...', self._povm, rho))

    def forward(self, x, smoothed=True):
        return forward(self, x, smoothed)

    def predict(self, x, smoothed=True):
        return predict(self, x, smoothed)

    def copy(self):
        return ClassifierSpec(self._encoding, self._ansatz, self._theta.copy(), self._povm,
                              self._smoothing,
                              None if self._frontend is None else self._frontend.copy(),
                              self._threshold)

    def to_dict(self):
        return {'encoding': self._encoding.to_dict(),
                'ansatz': None if self._ansatz is None else self._ansatz.to_dict(),
                'theta': self._theta.tolist(),
                'povm': {'real': self._povm.real.tolist(), 'imag': self._povm.imag.tolist()},
                'smoothing': None if self._smoothing is None else self._smoothing.to_dict(),
                'frontend': None if self._frontend is None else self._frontend.to_dict(),
                'threshold': self._threshold}

    @classmethod
    def from_dict(cls, d):
        povm = np.asarray(d['povm']['real']) + 1j * np.asarray(d['povm']['imag'])
        return cls(EncodingSpec.from_dict(d['encoding']),
                   ansatz=None if d.get('ansatz') is None else Ansatz.from_dict(d['ansatz']),
                   theta=d.get('theta'), povm=povm,
                   smoothing=None if d.get('smoothing') is None
                   else Smoothing.from_dict(d['smoothing']),
                   frontend=None if d.get('frontend') is None
                   else LinearFrontEnd.from_dict(d['frontend']),
                   threshold=d.get('threshold', 0.5))

    def __repr__(self):
        return '<ClassifierSpec qubits=%d params=%d smoothing=%s frontend=%s>' % (
            self.n_qubits, self._theta.size, self._smoothing, self._frontend)


def forward(spec, x, smoothed=True):
    """Measurement probability y(x) in [0, 1]; smoothing channels are used when set."""
    y = spec.expectation(spec.features(x), smoothed=smoothed)
    return float(np.clip(y, 0.0, 1.0))


def forward_batch(spec, X, smoothed=True, threads=1):
    """forward over the rows of ``X``, in row order."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if threads <= 1:
        return np.array([forward(spec, x, smoothed) for x in X])
    chunks = np.array_split(np.arange(len(X)), threads)
    tasks = [dask.delayed(lambda idx: [forward(spec, X[i], smoothed) for i in idx])(c)
             for c in chunks]
    parts = dask.compute(*tasks, scheduler='threads', num_workers=threads)
    return np.array([y for p in parts for y in p])


def eta(y, threshold=0.5):
    """Class decision 1{y > threshold}."""
    return int(y > threshold)


def predict(spec, x, smoothed=True):
    return eta(forward(spec, x, smoothed), spec.threshold)


def bce_loss(p, label):
    """Binary cross entropy with p clamped into [1e-9, 1 - 1e-9]."""
    p = np.clip(p, PROB_CLAMP, 1 - PROB_CLAMP)
    return -(label * np.log(p) + (1 - label) * np.log(1 - p))


def _bce_slope(p, label):
    p = np.clip(p, PROB_CLAMP, 1 - PROB_CLAMP)
    return -label / p + (1 - label) / (1 - p)


def _shifted_unitaries(spec, mode='parameter_shift', h=1e-4):
    """(plus, minus, scale) lists of slot unitaries for every parameter."""
    shift = np.pi / 2 if mode == 'parameter_shift' else h
    scale = 0.5 if mode == 'parameter_shift' else 1 / (2 * h)
    plus, minus = [], []
    for k in range(spec.theta.size):
        e = np.zeros(spec.theta.size)
        e[k] = shift
        plus.append(slot_unitaries(spec.encoding, spec.variational(spec.theta + e)))
        minus.append(slot_unitaries(spec.encoding, spec.variational(spec.theta - e)))
    return plus, minus, scale


def output_gradient(spec, x, mode='parameter_shift', h=1e-4, smoothed=True, shifted=None):
    """d y / d theta at ``x``.

    Every parameter is the angle of a single Pauli rotation, so the shift rule
    (y(theta + pi/2) - y(theta - pi/2)) / 2 is exact; ``finite_difference``
    uses central differences with step ``h``.
    """
    if mode not in GRADIENT_MODES:
        raise ValueError(f"Unknown gradient mode '{mode}', expected one of {GRADIENT_MODES}")
    v = spec.features(x)
    plus, minus, scale = shifted or _shifted_unitaries(spec, mode, h)
    grad = np.empty(spec.theta.size)
    for k in range(spec.theta.size):
        grad[k] = scale * (spec.expectation(v, smoothed, unitaries=plus[k])
                           - spec.expectation(v, smoothed, unitaries=minus[k]))
    return grad


def gradient(spec, x, label, mode='parameter_shift', h=1e-4, smoothed=True):
    """Gradient of the BCE loss with respect to theta."""
    p = spec.expectation(spec.features(x), smoothed)
    return _bce_slope(p, label) * output_gradient(spec, x, mode, h, smoothed)


def _shift_rule_applies(spec, smoothed):
    layers = spec.encoding.layers
    if not all(layer.is_rotation_stack and not layer.is_product for layer in layers):
        return False
    return not (smoothed and spec.has_data_dependent_smoothing)


def feature_gradient(spec, v, smoothed=True, h=1e-4):
    """d y / d v at encoded features ``v`` (before clipping).

    Rotation-stack encodings are differentiated gate by gate with the shift
    rule; anything else falls back to central finite differences.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    grad = np.zeros(v.size)
    enc = spec.encoding
    unitaries = slot_unitaries(enc, spec.variational())
    if not _shift_rule_applies(spec, smoothed):
        for f in range(v.size):
            e = np.zeros(v.size)
            e[f] = h
            grad[f] = (spec.expectation(v + e, smoothed, unitaries)
                       - spec.expectation(v - e, smoothed, unitaries)) / (2 * h)
        return grad
    angles = [layer.gate_angles(layer.feature_value(v)) for layer in enc.layers]
    sites = [(k, q) for k, layer in enumerate(enc.layers) for q in layer.touched_qubits]
    phases = []
    for k, layer in enumerate(enc.layers):
        batch = np.tile(angles[k], (2 * len(sites), 1))
        for s, (kk, q) in enumerate(sites):
            if kk == k:
                batch[2 * s, q] += np.pi / 2
                batch[2 * s + 1, q] -= np.pi / 2
        phases.append(layer.phases_from_angles(batch))
    y = spec.expectation(v, smoothed, unitaries, phases=phases)
    for s, (k, q) in enumerate(sites):
        layer = enc.layers[k]
        grad[layer.feature] += 0.5 * layer.scale * layer.qubit_scales[q] * (y[2 * s] - y[2 * s + 1])
    return grad


def input_gradient(spec, x, smoothed=True, h=1e-4):
    """d y / d x at the raw input, through the front-end when attached."""
    v = spec.features(x)
    g = feature_gradient(spec, v, smoothed, h)
    if spec.frontend is not None:
        return spec.frontend.W.T @ g
    return g


class TrainConfig(object):
    """Mini-batch gradient descent settings.

    ``smoothed`` trains through the smoothing channels of ``spec``; by default
    the base classifier is trained and smoothed afterwards.
    """

    def __init__(self, learning_rate=0.1, epochs=100, batch_size=16, seed=0,
                 gradient='parameter_shift', h=1e-4, smoothed=False):
        if learning_rate <= 0:
            raise ValueError(f"Learning rate must be positive, got {learning_rate}")
        if epochs < 0:
            raise ValueError(f"Epoch count must be non-negative, got {epochs}")
        if batch_size < 1:
            raise ValueError(f"Batch size must be at least 1, got {batch_size}")
        if gradient not in GRADIENT_MODES:
            raise ValueError(f"Unknown gradient mode '{gradient}', expected one of "
                             f"{GRADIENT_MODES}")
        self.learning_rate = float(learning_rate)
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.seed = seed
        self.gradient = gradient
        self.h = float(h)
        self.smoothed = bool(smoothed)

    def __repr__(self):
        return '<TrainConfig lr=%g epochs=%d batch=%d gradient=%s>' % (
            self.learning_rate, self.epochs, self.batch_size, self.gradient)


def train(spec, dataset, cfg=None):
    """Fit theta (and the front-end, when attached) by minimising mean BCE.

    Returns a trained copy of ``spec`` and the per-epoch mean loss over the
    points visited in that epoch.
    """
    cfg = TrainConfig() if cfg is None else cfg
    points = np.asarray(dataset.points, dtype=float)
    labels = np.asarray(dataset.labels)
    if len(points) == 0:
        raise ValueError("Cannot train on an empty dataset")
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("Training labels must be 0 or 1")
    spec = spec.copy()
    if spec.theta.size == 0 and spec.frontend is None:
        raise ValueError("The classifier has no trainable parameters")
    rng = np.random.default_rng(cfg.seed)
    losses = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(points))
        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            shifted = _shifted_unitaries(spec, cfg.gradient, cfg.h) if spec.theta.size else None
            g_theta = np.zeros(spec.theta.size)
            if spec.frontend is not None:
                g_w = np.zeros_like(spec.frontend.W)
                g_b = np.zeros_like(spec.frontend.b)
            for i in batch:
                x, y = points[i], labels[i]
                v = spec.features(x)
                p = spec.expectation(v, cfg.smoothed)
                epoch_loss += bce_loss(p, y)
                slope = _bce_slope(p, y)
                if shifted is not None:
                    g_theta += slope * output_gradient(spec, x, cfg.gradient, cfg.h,
                                                       cfg.smoothed, shifted)
                if spec.frontend is not None:
                    gv = slope * feature_gradient(spec, v, cfg.smoothed, cfg.h)
                    g_w += np.outer(gv, x)
                    g_b += gv
            step = cfg.learning_rate / len(batch)
            if spec.theta.size:
                spec.theta = spec.theta - step * g_theta
            if spec.frontend is not None:
                spec.frontend.W = spec.frontend.W - step * g_w
                spec.frontend.b = spec.frontend.b - step * g_b
        losses.append(float(epoch_loss / len(points)))
        log.info('epoch %d/%d  loss %.6f', epoch + 1, cfg.epochs, losses[-1])
    return spec, np.array(losses)


def noise_weights(spec):
    """Per-feature sum of squared noise coefficients of a smoothed classifier."""
    if spec.smoothing is None:
        raise ValueError("The classifier has no smoothing")
    return spec.smoothing.noise_weights(spec.encoding)
