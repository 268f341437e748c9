"""
Quantum kernels k(x, y) = Tr(rho(x) rho(y)) of the (optionally smoothed)
encoding, and kernel ridge regression on top of them.
"""
import logging

import dask
import numpy as np
from scipy import linalg

from ..encoding import sequential_state
from ..numerics import hermitian_asymmetry
from ..smoothing import as_smoothing, smooth_sequential_state
from .classifier import ClassifierSpec

__all__ = ['SingularGramError', 'encoded_state', 'kernel', 'gram_matrix', 'kernel_train',
           'KernelRidge']

log = logging.getLogger(__name__)

GRAM_TOL = 1e-8


class SingularGramError(ValueError):

    def __init__(self, message, ridge):
        self.message = message
        self.ridge = ridge

    def __str__(self):
        return '%s (ridge %.3e)' % (self.message, self.ridge)


def encoded_state(encoding, x, smoothing=None):
    """Encoding-only state; variational slots are left empty."""
    if smoothing is None:
        return sequential_state(encoding, x)
    return smooth_sequential_state(encoding, x, None, as_smoothing(smoothing))


def kernel(encoding, x, y, smoothing=None, normalize=False):
    """Tr(rho(x) rho(y)); ``normalize`` divides by sqrt(k(x, x) k(y, y))."""
    rx = encoded_state(encoding, x, smoothing).matrix
    ry = encoded_state(encoding, y, smoothing).matrix
    k = float(np.real(np.sum(rx * ry.T)))
    if normalize:
        k /= np.sqrt(np.real(np.sum(rx * rx.T)) * np.real(np.sum(ry * ry.T)))
    return k


def _states(encoding, X, smoothing, threads):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if threads <= 1:
        return np.array([encoded_state(encoding, x, smoothing).matrix for x in X])
    tasks = [dask.delayed(encoded_state)(encoding, x, smoothing) for x in X]
    states = dask.compute(*tasks, scheduler='threads', num_workers=threads)
    return np.array([s.matrix for s in states])


def gram_matrix(encoding, X, Y=None, smoothing=None, threads=1):
    """Kernel matrix G[a, b] = k(X[a], Y[b]); ``Y`` defaults to ``X``."""
    sx = _states(encoding, X, smoothing, threads)
    sy = sx if Y is None else _states(encoding, Y, smoothing, threads)
    return np.real(np.einsum('aij,bji->ab', sx, sy))


def kernel_train(gram, labels, ridge=1e-3, jitter=1e-8):
    """Dual coefficients (G + (ridge + jitter) I)^-1 y of kernel ridge regression."""
    g = np.asarray(gram, dtype=float)
    y = np.asarray(labels, dtype=float).ravel()
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] != y.size:
        raise ValueError(f"Gram matrix of shape {g.shape} does not match {y.size} labels")
    if ridge < 0:
        raise ValueError(f"Ridge must be non-negative, got {ridge}")
    asym = hermitian_asymmetry(g)
    if asym > GRAM_TOL:
        raise ValueError(f"Gram matrix is not symmetric (max asymmetry {asym:.3e})")
    reg = 0.5 * (g + g.T) + (ridge + jitter) * np.eye(y.size)
    try:
        factor = linalg.cho_factor(reg, lower=True)
    except linalg.LinAlgError:
        raise SingularGramError('Kernel ridge system is not positive definite', ridge)
    return linalg.cho_solve(factor, y)


class KernelRidge(object):
    """Kernel ridge classifier over the encoded states of the training points.

    The regressed score s(x) = sum_i c_i k(x_i, x) equals Tr(O rho(x)) with
    O = sum_i c_i rho(x_i); class 1 is predicted when s(x) > 1/2.
    """

    def __init__(self, encoding, smoothing=None, ridge=1e-3, jitter=1e-8):
        self.encoding = encoding
        self.smoothing = None if smoothing is None else as_smoothing(smoothing)
        self.ridge = ridge
        self.jitter = jitter
        self.coefficients = None
        self.observable = None

    def fit(self, points, labels, threads=1):
        states = _states(self.encoding, points, self.smoothing, threads)
        gram = np.real(np.einsum('aij,bji->ab', states, states))
        self.coefficients = kernel_train(gram, labels, self.ridge, self.jitter)
        obs = np.einsum('a,aij->ij', self.coefficients, states)
        self.observable = 0.5 * (obs + obs.conj().T)
        log.info('kernel ridge: fitted %d points', len(self.coefficients))
        return self

    def _check_fitted(self):
        if self.observable is None:
            raise ValueError("KernelRidge is not fitted yet")

    def decision_function(self, x):
        self._check_fitted()
        rho = encoded_state(self.encoding, x, self.smoothing).matrix
        return float(np.real(np.sum(self.observable.T * rho)))

    def predict(self, x):
        return int(self.decision_function(x) > 0.5)

    def score(self, points, labels):
        """Fraction of correctly classified points."""
        pred = np.array([self.predict(x) for x in np.atleast_2d(points)])
        return float(np.mean(pred == np.asarray(labels)))

    def to_classifier(self):
        """Equivalent measurement classifier with POVM (O - a I) / (b - a).

        a and b are the extreme eigenvalues of O, so the POVM lies in [0, I] and
        s(x) > 1/2 becomes Tr(Pi rho(x)) > (1/2 - a) / (b - a).
        """
        self._check_fitted()
        w = np.linalg.eigvalsh(self.observable)
        a, b = w[0], w[-1]
        if not a < 0.5 < b:
            raise ValueError(f"Scores span [{a:.3f}, {b:.3f}] and never cross 1/2; the "
                             f"classifier is constant")
        povm = (self.observable - a * np.eye(self.encoding.dim)) / (b - a)
        return ClassifierSpec(self.encoding, povm=povm, smoothing=self.smoothing,
                              threshold=(0.5 - a) / (b - a))

    def to_dict(self):
        self._check_fitted()
        return {'ridge': self.ridge, 'jitter': self.jitter,
                'coefficients': self.coefficients.tolist(),
                'observable': {'real': self.observable.real.tolist(),
                               'imag': self.observable.imag.tolist()}}
