"""
Certificates for smoothed classifiers, in exact-expectation and shot-based
modes, and the certified-accuracy curves built from them.
"""
import logging

import dask
import numpy as np
import pandas as pd
import xarray as xr

from ..model import forward
from ..smoothing import GaussianDistribution
from .radius import (clopper_pearson_lower, radius_from_weights, radius_uniform,
                     threshold_adjusted)

__all__ = ['MODES', 'CERTIFICATE_COLUMNS', 'Certificate', 'certify_point', 'certify_dataset',
           'curve_from_certificates', 'certified_curve', 'certificates_to_frame']

log = logging.getLogger(__name__)

MODES = ('exact', 'shots')
CERTIFICATE_COLUMNS = ['point_id', 'label', 'prediction', 'p_lower', 'radius', 'confidence',
                       'strategy', 'mode']


class Certificate(object):
    """Prediction of a smoothed classifier at one point and its certified radius."""

    def __init__(self, point_id, prediction, p_lower, radius, confidence, mode, strategy,
                 label=None, probability=None, shots=None, frontend_norm=None):
        if radius < 0:
            raise ValueError(f"Certified radius must be non-negative, got {radius}")
        if mode == 'exact' and confidence != 1.0:
            raise ValueError("Exact certificates have confidence 1")
        self.point_id = point_id
        self.label = label
        self.prediction = prediction
        self.probability = probability
        self.p_lower = p_lower
        self.radius = radius
        self.confidence = confidence
        self.mode = mode
        self.strategy = strategy
        self.shots = shots
        self.frontend_norm = frontend_norm

    @property
    def certified(self):
        return self.radius > 0

    @property
    def correct(self):
        return self.label is not None and self.prediction == self.label

    def to_dict(self):
        return {'point_id': self.point_id, 'label': self.label, 'prediction': self.prediction,
                'p_lower': self.p_lower, 'radius': self.radius, 'confidence': self.confidence,
                'strategy': self.strategy, 'mode': self.mode}

    def __repr__(self):
        return '<Certificate #%s class=%d p=%.4f radius=%.4f %s>' % (
            self.point_id, self.prediction, self.p_lower, self.radius, self.mode)


def _check_certifiable(spec):
    if spec.smoothing is None:
        raise ValueError("Certification needs a smoothed classifier; set a smoothing first")
    dist = spec.smoothing.distribution
    if not isinstance(dist, GaussianDistribution) or dist.sigma <= 0:
        raise ValueError(f"Certified radii need Gaussian smoothing with sigma > 0, got {dist}")


def _radius(spec, p_lower, formula):
    smoothing = spec.smoothing
    sigma = smoothing.sigma
    if smoothing.strategy == 'uniform' and formula == 'compact':
        if not all(layer.is_rotation_stack for layer in spec.encoding.layers):
            raise ValueError("The uniform radius formula needs rotation-stack layers")
        counts = smoothing.layer_counts(spec.encoding)
        return min(radius_uniform(sigma, n_layers, n_qubits, p_lower, 'compact')
                   for n_layers, n_qubits in counts.values())
    return radius_from_weights(sigma, smoothing.noise_weights(spec.encoding), p_lower)


def certify_point(spec, x, label=None, mode='exact', alpha=0.05, shots=10000, seed=0,
                  point_id=0, formula='conservative'):
    """Certify the smoothed classifier ``spec`` at ``x``.

    Parameters
    ----------
    spec : ClassifierSpec
        classifier with Gaussian smoothing
    x : array_like
        raw input (before the front-end, if any)
    label : int, optional
        ground truth, stored on the certificate
    mode : str
        ``'exact'`` reads the smoothed probability directly, ``'shots'`` draws
        ``shots`` measurement outcomes and bounds the probability from below
        at confidence ``1 - alpha``
    seed, point_id
        the shot stream of a point is seeded by ``(seed, point_id)``
    formula : str
        uniform-strategy radius formula, ``'conservative'`` or ``'compact'``

    Returns
    -------
    Certificate
        the radius is in raw-input space: divided by the front-end's spectral
        norm when one is attached, and zero when the bound does not clear the
        decision threshold
    """
    _check_certifiable(spec)
    if mode not in MODES:
        raise ValueError(f"Unknown certification mode '{mode}', expected one of {MODES}")
    y = forward(spec, x)
    t = spec.threshold
    if mode == 'exact':
        prediction = int(y > t)
        p_class = y if prediction == 1 else 1 - y
        confidence = 1.0
        n = None
    else:
        if shots < 1:
            raise ValueError(f"Shot-based certification needs at least one shot, got {shots}")
        rng = np.random.default_rng([seed, point_id])
        ones = int(rng.binomial(shots, y))
        prediction = int(ones / shots > t)
        k = ones if prediction == 1 else shots - ones
        p_class = clopper_pearson_lower(k, shots, alpha)
        confidence = 1 - alpha
        n = shots
    t_class = t if prediction == 1 else 1 - t
    p_lower = float(min(p_class, 1 - 1e-12))
    if p_lower <= t_class:
        radius = 0.0
    else:
        radius = _radius(spec, threshold_adjusted(p_lower, t_class), formula)
    fe_norm = None
    if spec.frontend is not None:
        fe_norm = spec.frontend.spectral_norm
        radius = radius / fe_norm if fe_norm > 0 else np.inf
    return Certificate(point_id, prediction, p_lower, radius, confidence, mode,
                       spec.smoothing.strategy, label=label, probability=y, shots=n,
                       frontend_norm=fe_norm)


def certify_dataset(spec, dataset, mode='exact', alpha=0.05, shots=10000, seed=0,
                    formula='conservative', threads=1):
    """Certificates for every point of ``dataset``, in dataset order."""
    points = np.asarray(dataset.points, dtype=float)
    labels = np.asarray(dataset.labels)
    if len(points) == 0:
        raise ValueError("Cannot certify an empty dataset")
    _check_certifiable(spec)

    def run(idx):
        return [certify_point(spec, points[i], int(labels[i]), mode, alpha, shots, seed, int(i),
                              formula) for i in idx]

    if threads <= 1:
        certs = run(range(len(points)))
    else:
        chunks = np.array_split(np.arange(len(points)), threads)
        parts = dask.compute(*[dask.delayed(run)(c) for c in chunks], scheduler='threads',
                             num_workers=threads)
        certs = [c for p in parts for c in p]
    log.info('certified %d points (%s, sigma=%g, %s)', len(certs), mode, spec.smoothing.sigma,
             spec.smoothing.strategy)
    return certs


def curve_from_certificates(certs, radii):
    """Certified ratio and certified accuracy at every radius of ``radii``.

    A point counts at radius r when it is certified (radius > 0) with
    radius >= r; accuracy also requires the prediction to match the label.
    """
    if len(certs) == 0:
        raise ValueError("No certificates to build a curve from")
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    r = np.array([c.radius for c in certs])
    correct = np.array([c.correct for c in certs])
    covered = (r[None, :] > 0) & (r[None, :] >= radii[:, None])
    ratio = covered.mean(axis=1)
    accuracy = (covered & correct[None, :]).mean(axis=1)
    ds = xr.Dataset({'certified_ratio': (['radius'], ratio),
                     'certified_accuracy': (['radius'], accuracy)},
                    coords={'radius': (['radius'], radii)},
                    attrs={'n_points': len(certs), 'mode': certs[0].mode,
                           'strategy': certs[0].strategy})
    ds.radius.attrs['long_name'] = 'L2 radius in input space'
    return ds


def certified_curve(spec, dataset, radii, mode='exact', alpha=0.05, shots=10000, seed=0,
                    formula='conservative', threads=1):
    """Certify ``dataset`` and return the per-radius curve as an xarray Dataset."""
    certs = certify_dataset(spec, dataset, mode, alpha, shots, seed, formula, threads)
    ds = curve_from_certificates(certs, radii)
    ds.attrs['sigma'] = spec.smoothing.sigma
    return ds


def certificates_to_frame(certs):
    """One row per certificate with the CSV columns."""
    return pd.DataFrame([c.to_dict() for c in certs], columns=CERTIFICATE_COLUMNS)
