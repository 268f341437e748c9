"""
Upper bounds on the trace distance between smoothed encodings of two inputs.

The distance between smoothed states never exceeds the total variation
distance between the shifted noise laws; for Gaussian noise that is
2 Phi(|x - y| / (2 sigma)) - 1, otherwise it is integrated numerically.
"""
import logging

import numpy as np
from scipy import integrate

from ..numerics import std_normal_cdf

__all__ = ['TraceBoundResult', 'gaussian_parallel_bound', 'gaussian_sequential_bound',
           'generic_bound_1d', 'generic_bound_Ld']

log = logging.getLogger(__name__)

QUAD_TOL = 1e-6
METHODS = ('closed_form', 'quadrature', 'monte_carlo')


class TraceBoundResult(object):
    """A bound value in [0, 1] together with how it was obtained."""

    def __init__(self, value, method, error=0.0, samples=None):
        if method not in METHODS:
            raise ValueError(f"Unknown bound method '{method}'")
        self.value = float(np.clip(value, 0.0, 1.0))
        self.method = method
        self.error = float(error)
        self.samples = samples

    def __float__(self):
        return self.value

    def __repr__(self):
        return '<TraceBoundResult %.6f (%s, error %.2e)>' % (self.value, self.method, self.error)


def _distance(x, y):
    return float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float) - y)))


def gaussian_parallel_bound(sigma, x, y):
    """2 Phi(|x - y| / (2 sigma)) - 1 for a single Gaussian-smoothed layer."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return TraceBoundResult(2 * std_normal_cdf(_distance(x, y) / (2 * sigma)) - 1, 'closed_form')


def gaussian_sequential_bound(sigma, n_layers, x, y):
    """2 Phi(sqrt(L) |x - y| / (2 sigma)) - 1 for L independently smoothed layers."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n_layers < 1:
        raise ValueError(f"Layer count must be at least 1, got {n_layers}")
    d = np.sqrt(n_layers) * _distance(x, y)
    return TraceBoundResult(2 * std_normal_cdf(d / (2 * sigma)) - 1, 'closed_form')


def generic_bound_1d(dist, x, y):
    """Total variation between the noise law shifted to ``x`` and to ``y``.

    Integrates max(f(z - x) - f(z - y), 0) by adaptive quadrature, split at the
    midpoint and at the support edges.
    """
    if not dist.has_density:
        raise ValueError(f"{dist} has no density to integrate")
    x, y = float(x), float(y)
    if x == y:
        return TraceBoundResult(0.0, 'quadrature')

    def integrand(z):
        return max(float(dist.pdf(z - x) - dist.pdf(z - y)), 0.0)

    lo, hi = dist.support()
    mid = 0.5 * (x + y)
    if np.isfinite(lo) and np.isfinite(hi):
        edges = sorted(set([x + lo, x + hi, y + lo, y + hi, mid]))
        pieces = zip(edges[:-1], edges[1:])
    else:
        pieces = [(-np.inf, mid), (mid, np.inf)]
    value, err = 0.0, 0.0
    for a, b in pieces:
        v, e = integrate.quad(integrand, a, b, limit=200, epsabs=1e-10)
        value += v
        err += e
    if err > QUAD_TOL:
        log.warning('generic_bound_1d: quadrature error %.2e exceeds %.0e', err, QUAD_TOL)
    return TraceBoundResult(value, 'quadrature', error=err)


def generic_bound_Ld(dist, n_layers, x, y, samples=10 ** 5, seed=0, chunk=10 ** 5):
    """Total variation between L-fold product laws shifted to ``x`` and ``y``.

    Importance sampling with the proposal centred at ``x``:
    TV = E_x[max(1 - prod f(z_i - y) / prod f(z_i - x), 0)]. The standard
    error of the estimate is returned as ``error``.
    """
    if n_layers < 1:
        raise ValueError(f"Layer count must be at least 1, got {n_layers}")
    if not dist.has_density:
        raise ValueError(f"{dist} has no density")
    x, y = float(x), float(y)
    if x == y:
        return TraceBoundResult(0.0, 'monte_carlo', samples=samples)
    rng = np.random.default_rng(seed)
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        m = min(chunk, samples - done)
        z = x + dist.sample(rng, (m, n_layers))
        with np.errstate(divide='ignore'):
            log_ratio = np.sum(dist.logpdf(z - y), axis=1) - np.sum(dist.logpdf(z - x), axis=1)
        vals = np.maximum(1 - np.exp(log_ratio), 0.0)
        total += vals.sum()
        total_sq += np.sum(vals ** 2)
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    return TraceBoundResult(mean, 'monte_carlo', error=np.sqrt(var / max(samples - 1, 1)),
                            samples=samples)
