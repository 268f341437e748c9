"""
Trainable classical linear map applied to raw inputs before encoding.
"""
import numpy as np

from ..numerics import spectral_norm

__all__ = ['LinearFrontEnd', 'frontend_forward', 'frontend_spectral_norm']


class LinearFrontEnd(object):
    """v = W x + b, mapping ``in_dim`` raw features to ``out_dim`` encoded ones."""

    def __init__(self, W, b=None):
        self.W = W
        self.b = b

    @property
    def W(self):
        return self._W

    @W.setter
    def W(self, w):
        w = np.array(w, dtype=float)
        if w.ndim != 2:
            raise ValueError(f"Front-end weight must be a matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("Front-end weight has non-finite entries")
        self._W = w
        self._norm = None

    @property
    def b(self):
        return self._b

    @b.setter
    def b(self, b):
        b = np.zeros(self._W.shape[0]) if b is None else np.array(b, dtype=float).ravel()
        if b.size != self._W.shape[0]:
            raise ValueError(f"Front-end bias has {b.size} entries, expected {self._W.shape[0]}")
        if not np.all(np.isfinite(b)):
            raise ValueError("Front-end bias has non-finite entries")
        self._b = b

    @property
    def in_dim(self):
        return self._W.shape[1]

    @property
    def out_dim(self):
        return self._W.shape[0]

    @property
    def spectral_norm(self):
        if self._norm is None:
            self._norm = spectral_norm(self._W)
        return self._norm

    @classmethod
    def random(cls, in_dim, out_dim, seed=0, scale=None):
        """Gaussian init with std ``scale`` (default 1/sqrt(in_dim)) and zero bias."""
        rng = np.random.default_rng(seed)
        scale = 1 / np.sqrt(in_dim) if scale is None else scale
        return cls(rng.normal(0, scale, (out_dim, in_dim)))

    def copy(self):
        return LinearFrontEnd(self._W.copy(), self._b.copy())

    def to_dict(self):
        return {'W': self._W.tolist(), 'b': self._b.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d['W'], d['b'])

    def __repr__(self):
        return '<LinearFrontEnd %d -> %d>' % (self.in_dim, self.out_dim)


def frontend_forward(fe, x):
    """W x + b; ``x`` may carry leading batch axes."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != fe.in_dim:
        raise ValueError(f"Front-end expects {fe.in_dim} inputs, got {x.shape[-1]}")
    return x @ fe.W.T + fe.b


def frontend_spectral_norm(fe):
    return fe.spectral_norm
