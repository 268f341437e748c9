"""
Zero-mean symmetric noise laws used for smoothing.

Each law exposes its characteristic function, density and a seeded sampler.
Use the ``Distribution`` factory to build one from a kind name.
"""
import numpy as np
from scipy import stats

__all__ = ['SmoothingDistribution', 'GaussianDistribution', 'UniformDistribution',
           'CustomDistribution', 'Distribution']


class SmoothingDistribution(object):
    """Base class; subclasses fill in ``characteristic``, ``pdf`` and ``sample``."""

    kind = 'base'

    def characteristic(self, t):
        raise NotImplementedError

    def pdf(self, z):
        raise NotImplementedError(f"{self.kind} distribution has no density")

    def logpdf(self, z):
        with np.errstate(divide='ignore'):
            return np.log(self.pdf(z))

    def sample(self, rng, size=None):
        raise NotImplementedError

    @property
    def has_density(self):
        return True

    @property
    def sigma(self):
        """Standard deviation of the law."""
        raise NotImplementedError

    def support(self):
        """(lower, upper) bounds of the density's support."""
        return -np.inf, np.inf

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self.to_dict())


class GaussianDistribution(SmoothingDistribution):
    """N(0, sigma^2); characteristic function exp(-sigma^2 t^2 / 2)."""

    kind = 'gaussian'

    def __init__(self, sigma=1.0):
        if sigma < 0:
            raise ValueError(f"Gaussian sigma must be non-negative, got {sigma}")
        self._sigma = float(sigma)

    @property
    def sigma(self):
        return self._sigma

    @property
    def has_density(self):
        return self._sigma > 0

    def characteristic(self, t):
        return np.exp(-0.5 * self._sigma ** 2 * np.square(t))

    def pdf(self, z):
        if self._sigma == 0:
            raise ValueError("A zero-width Gaussian has no density")
        return stats.norm.pdf(z, scale=self._sigma)

    def logpdf(self, z):
        if self._sigma == 0:
            raise ValueError("A zero-width Gaussian has no density")
        return stats.norm.logpdf(z, scale=self._sigma)

    def sample(self, rng, size=None):
        return rng.normal(0.0, self._sigma, size=size)

    def support(self):
        if self._sigma == 0:
            return 0.0, 0.0
        return -np.inf, np.inf

    def to_dict(self):
        return {'kind': self.kind, 'sigma': self._sigma}


class UniformDistribution(SmoothingDistribution):
    """Uniform on [-a/2, a/2]; characteristic function sin(a t / 2) / (a t / 2)."""

    kind = 'uniform'

    def __init__(self, width=1.0):
        if width <= 0:
            raise ValueError(f"Uniform width must be positive, got {width}")
        self.width = float(width)

    @property
    def sigma(self):
        return self.width / np.sqrt(12)

    def characteristic(self, t):
        # np.sinc(u) = sin(pi u) / (pi u)
        return np.sinc(self.width * np.asarray(t, dtype=float) / (2 * np.pi))

    def pdf(self, z):
        return stats.uniform.pdf(z, loc=-self.width / 2, scale=self.width)

    def logpdf(self, z):
        return stats.uniform.logpdf(z, loc=-self.width / 2, scale=self.width)

    def sample(self, rng, size=None):
        return rng.uniform(-self.width / 2, self.width / 2, size=size)

    def support(self):
        return -self.width / 2, self.width / 2

    def to_dict(self):
        return {'kind': self.kind, 'width': self.width}


class CustomDistribution(SmoothingDistribution):
    """User-supplied law; ``characteristic`` is required, density and sampler optional."""

    kind = 'custom'

    def __init__(self, characteristic, pdf=None, sampler=None, sigma=None, support=None):
        if abs(float(np.real(characteristic(0.0))) - 1) > 1e-12:
            raise ValueError("A characteristic function must equal 1 at t = 0")
        self._phi = characteristic
        self._pdf = pdf
        self._sampler = sampler
        self._sigma = sigma
        self._support = support

    @property
    def has_density(self):
        return self._pdf is not None

    @property
    def sigma(self):
        if self._sigma is None:
            raise ValueError("Custom distribution was built without a sigma")
        return self._sigma

    def characteristic(self, t):
        return np.real(self._phi(t))

    def pdf(self, z):
        if self._pdf is None:
            raise ValueError("Custom distribution was built without a density")
        return self._pdf(z)

    def sample(self, rng, size=None):
        if self._sampler is None:
            raise ValueError("Custom distribution was built without a sampler")
        return self._sampler(rng, size)

    def support(self):
        return self._support if self._support is not None else (-np.inf, np.inf)

    def to_dict(self):
        return {'kind': self.kind, 'sigma': self._sigma}


def Distribution(kind, **params):
    """
    Build a smoothing distribution from its kind name.

    Parameters
    ----------
    kind : str
        ``'gaussian'`` (param ``sigma``), ``'uniform'`` (param ``width`` or
        ``sigma``, the latter converted to width sqrt(12) sigma) or ``'custom'``
    params
        forwarded to the distribution class

    Returns
    -------
        Specialized SmoothingDistribution object
    """
    if kind == 'gaussian':
        return GaussianDistribution(**params)
    elif kind == 'uniform':
        if 'sigma' in params:
            sigma = params.pop('sigma')
            params['width'] = np.sqrt(12) * sigma
        return UniformDistribution(**params)
    elif kind == 'custom':
        return CustomDistribution(**params)
    else:
        raise ValueError(f"'{kind}' is not a supported smoothing distribution")
