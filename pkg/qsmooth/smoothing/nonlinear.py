"""
Smoothing of product features x1 * x2, where the channel depends on the data.
"""
import logging

import numpy as np
from scipy import integrate

from .channels import SmoothingMatrix
from .distributions import GaussianDistribution

__all__ = ['nonlinear_pd_param', 'nonlinear_smoothing_matrix', 'cross_term']

log = logging.getLogger(__name__)


def cross_term(dist, samples=10 ** 6, seed=0):
    """Monte-Carlo estimate of E[exp(-i d1 d2)] for i.i.d. d1, d2.

    Returns the (real) mean and its standard error; the imaginary part vanishes
    for symmetric laws.
    """
    rng = np.random.default_rng(seed)
    d1 = dist.sample(rng, samples)
    d2 = dist.sample(rng, samples)
    vals = np.cos(d1 * d2)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


def nonlinear_pd_param(dist, x1, x2, samples=10 ** 6, seed=0):
    """Phase-damping parameter 1 - (phi(x1) phi(x2) E[exp(-i d1 d2)])^2 for RZ(x1 x2).

    Parameters
    ----------
    dist : SmoothingDistribution
        i.i.d. law of the noise on each coordinate
    x1, x2 : float
        the two feature values
    samples, seed
        Monte-Carlo samples for non-Gaussian laws

    Returns
    -------
    ``(value, stderr)``; the Gaussian closed form
    1 - exp(-sigma^2 (x1^2 + x2^2)) / (1 + sigma^4) has zero standard error.
    """
    if isinstance(dist, GaussianDistribution):
        s2 = dist.sigma ** 2
        return float(1 - np.exp(-s2 * (x1 ** 2 + x2 ** 2)) / (1 + s2 ** 2)), 0.0
    amp = float(dist.characteristic(x1) * dist.characteristic(x2))
    m, se = cross_term(dist, samples, seed)
    # delta method through 1 - amp^2 m^2
    lam = 1 - (amp * m) ** 2
    log.debug('nonlinear_pd_param: E[cos(d1 d2)] = %.6f +/- %.2e', m, se)
    return float(lam), float(2 * amp ** 2 * abs(m) * se)


def _gaussian_factor(sigma, delta, x1, x2):
    s2 = sigma ** 2
    k = 1 + s2 ** 2 * delta ** 2
    return (np.exp(-s2 * delta ** 2 * (x1 ** 2 + x2 ** 2) / (2 * k)
                   + 1j * s2 ** 2 * delta ** 3 * x1 * x2 / k) / np.sqrt(k))


def _quadrature_factor(dist, delta, x1, x2):
    # E_d1[exp(-i delta x2 d1) phi(delta (x1 + d1))]
    lo, hi = dist.support()

    def re(z):
        return dist.pdf(z) * np.cos(delta * x2 * z) * dist.characteristic(delta * (x1 + z))

    def im(z):
        return -dist.pdf(z) * np.sin(delta * x2 * z) * dist.characteristic(delta * (x1 + z))

    return integrate.quad(re, lo, hi, limit=200)[0] + 1j * integrate.quad(im, lo, hi, limit=200)[0]


def nonlinear_smoothing_matrix(dist, eigenvalues, x1, x2):
    """Exact attenuation matrix of a product-feature layer at (x1, x2).

    Entry (i, j) is E[exp(-i (l_i - l_j) ((x1 + d1)(x2 + d2) - x1 x2))]: a
    complex Hermitian PSD matrix. Gaussian noise has a closed form, other laws
    with a density are integrated over d1.
    """
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    diff = lam[:, None] - lam[None, :]
    if isinstance(dist, GaussianDistribution):
        a = _gaussian_factor(dist.sigma, diff, x1, x2)
    else:
        if not dist.has_density:
            raise ValueError("Product-feature smoothing needs a density for non-Gaussian noise")
        uniq, inv = np.unique(np.round(np.abs(diff), 12), return_inverse=True)
        vals = np.array([_quadrature_factor(dist, d, x1, x2) if d != 0 else 1.0 for d in uniq])
        a = vals[inv].reshape(diff.shape)
        # the factor at -delta is the conjugate of the factor at delta
        a = np.where(diff < 0, a.conj(), a)
    np.fill_diagonal(a, 1.0)
    return SmoothingMatrix(a)
