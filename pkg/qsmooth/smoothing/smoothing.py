"""
Smoothed sequential encodings, exact (channels after every layer) and by
Monte-Carlo sampling of the encoding noise.
"""
import logging
from collections import defaultdict

import dask
import numpy as np

from ..encoding import evolve, slot_unitaries
from ..numerics import DensityMatrix
from .channels import (build_A, kraus_from_A, phase_damping, pd_param, conjugated_channel,
                       identity_channel)
from .distributions import Distribution, SmoothingDistribution
from .nonlinear import nonlinear_smoothing_matrix

__all__ = ['STRATEGIES', 'Smoothing', 'as_smoothing', 'mc_partial_sums', 'mc_smoothed_state',
           'smooth_sequential_state']

log = logging.getLogger(__name__)

STRATEGIES = ('exponential', 'uniform', 'layer')
MC_CHUNK = 4096


class Smoothing(object):
    """A noise law together with the way it is attached to encoding layers.

    Strategies for rotation-stack layers:

    - ``'exponential'``: an independent draw per gate added to the feature,
      i.e. phase damping 1 - phi(alpha s_q)^2 on qubit q
    - ``'uniform'``: an independent draw per gate added to the gate angle,
      i.e. phase damping 1 - phi(1)^2 on every touched qubit
    - ``'layer'``: a single draw per layer added to the feature; the channel
      comes from the spectral decomposition of the layer's smoothing matrix

    Generic spectra and product-feature layers always use one draw per layer.
    """

    def __init__(self, distribution, strategy='exponential'):
        self.distribution = distribution
        self.strategy = strategy

    @property
    def distribution(self):
        return self._distribution

    @distribution.setter
    def distribution(self, dist):
        if not isinstance(dist, SmoothingDistribution):
            raise ValueError(f"Expected a SmoothingDistribution, got {type(dist).__name__}")
        self._distribution = dist

    @property
    def strategy(self):
        return self._strategy

    @strategy.setter
    def strategy(self, s):
        if s not in STRATEGIES:
            raise ValueError(f"Unknown smoothing strategy '{s}', expected one of {STRATEGIES}")
        self._strategy = s

    @property
    def sigma(self):
        return self._distribution.sigma

    def _per_gate(self, layer):
        return layer.is_rotation_stack and not layer.is_product and self._strategy != 'layer'

    def layer_channel(self, layer, x=None):
        """Smoothing channel for one layer; product layers need the input ``x``."""
        dist = self._distribution
        label = {'distribution': dist.to_dict(), 'strategy': self._strategy}
        if layer.is_product:
            if x is None:
                raise ValueError("Product-feature smoothing depends on the input; pass x")
            i, j = layer.feature
            a = nonlinear_smoothing_matrix(dist, layer.scale * layer.eigenvalues, x[i], x[j])
            ch = kraus_from_A(a, label=label)
        elif not self._per_gate(layer):
            ch = kraus_from_A(build_A(dist, layer.scale * layer.eigenvalues), label=label)
        else:
            ch = identity_channel(layer.dim)
            for q in layer.touched_qubits:
                if self._strategy == 'exponential':
                    lam = pd_param(dist, layer.scale * layer.qubit_scales[q])
                else:
                    lam = pd_param(dist, 1.0)
                ch = ch.compose(phase_damping(lam).embed(q, layer.n_qubits))
            ch.label.update(label)
        if layer.basis is not None:
            ch = conjugated_channel(ch, layer.basis)
        return ch

    def channels(self, spec, x=None):
        return [self.layer_channel(layer, x) for layer in spec.layers]

    def sample_phases(self, layer, x, rng, n):
        """Diagonal phases of ``n`` noisy copies of ``layer`` at input ``x``."""
        dist = self._distribution
        if layer.is_product:
            i, j = layer.feature
            v = (x[i] + dist.sample(rng, n)) * (x[j] + dist.sample(rng, n))
            return layer.phases(v)
        v = layer.feature_value(x)
        if not self._per_gate(layer):
            return layer.phases(v + dist.sample(rng, n))
        q = layer.touched_qubits
        angles = np.tile(layer.gate_angles(v), (n, 1))
        noise = dist.sample(rng, (n, q.size))
        if self._strategy == 'exponential':
            angles[:, q] += layer.scale * layer.qubit_scales[q] * noise
        else:
            angles[:, q] += noise
        return layer.phases_from_angles(angles)

    def noise_weights(self, spec):
        """Per-feature sum of squared noise coefficients over all smoothing draws.

        A shift e_f of feature f moves the joint noise vector by
        sqrt(sum_f w_f e_f^2), so radii in input space divide by sqrt(max w_f).
        """
        w = defaultdict(float)
        for layer in spec.layers:
            if layer.is_product:
                raise ValueError("Certified radii are only defined for linear feature layers")
            if not self._per_gate(layer):
                w[layer.feature] += 1.0
            elif self._strategy == 'exponential':
                w[layer.feature] += float(layer.touched_qubits.size)
            else:
                s = layer.scale * layer.qubit_scales[layer.touched_qubits]
                w[layer.feature] += float(np.sum(s ** 2))
        return dict(w)

    def layer_counts(self, spec):
        """Per-feature (number of layers, widest layer in qubits)."""
        out = {}
        for f in spec.features:
            layers = spec.layers_for(f)
            out[f] = (len(layers), max(int(layer.touched_qubits.size) for layer in layers))
        return out

    def to_dict(self):
        return {'distribution': self._distribution.to_dict(), 'strategy': self._strategy}

    @classmethod
    def from_dict(cls, d):
        params = dict(d['distribution'])
        kind = params.pop('kind')
        return cls(Distribution(kind, **params), d.get('strategy', 'exponential'))

    def __repr__(self):
        return '<Smoothing %s strategy=%s>' % (self._distribution.to_dict(), self._strategy)


def as_smoothing(smoothing):
    """Accept a Smoothing or a bare distribution (exponential strategy)."""
    if isinstance(smoothing, Smoothing):
        return smoothing
    return Smoothing(smoothing)


def mc_partial_sums(spec, x, variational, smoothing, samples, seed, chunk_ids,
                    chunk_size=MC_CHUNK):
    """Sums over the listed sample chunks; chunk ``c`` is seeded by (seed, c).

    Returns ``(sum, sum of squared real parts, sum of squared imaginary parts, count)``.
    """
    smoothing = as_smoothing(smoothing)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    unitaries = slot_unitaries(spec, variational)
    total = np.zeros((spec.dim, spec.dim), dtype=complex)
    sq_re = np.zeros((spec.dim, spec.dim))
    sq_im = np.zeros((spec.dim, spec.dim))
    count = 0
    for c in chunk_ids:
        m = min(chunk_size, samples - c * chunk_size)
        if m <= 0:
            continue
        rng = np.random.default_rng([seed, c])
        phases = [smoothing.sample_phases(layer, x, rng, m) for layer in spec.layers]
        rho = evolve(spec, unitaries=unitaries, phases=phases)
        total += rho.sum(axis=0)
        sq_re += np.sum(rho.real ** 2, axis=0)
        sq_im += np.sum(rho.imag ** 2, axis=0)
        count += m
    return total, sq_re, sq_im, count


def mc_smoothed_state(spec, x, variational, smoothing, samples, seed=0, return_stderr=False,
                      threads=1, chunk_size=MC_CHUNK):
    """Monte-Carlo average of the sequential state over i.i.d. per-layer noise.

    Parameters
    ----------
    spec : EncodingSpec
    x : array_like
        clean input
    variational : list of array_like or None
        one unitary per slot
    smoothing : Smoothing or SmoothingDistribution
    samples : int
        number of noise draws
    seed : int
        results are identical for any ``threads`` given the same seed
    return_stderr : bool
        also return the entrywise standard error of the mean
    """
    if samples < 1:
        raise ValueError(f"Monte-Carlo smoothing needs at least one sample, got {samples}")
    n_chunks = -(-samples // chunk_size)
    groups = [list(range(k, n_chunks, threads)) for k in range(min(threads, n_chunks))]
    tasks = [dask.delayed(mc_partial_sums)(spec, x, variational, smoothing, samples, seed, g,
                                           chunk_size) for g in groups]
    scheduler = 'sync' if threads <= 1 else 'threads'
    parts = dask.compute(*tasks, scheduler=scheduler, num_workers=max(threads, 1))
    total = sum(p[0] for p in parts)
    sq_re = sum(p[1] for p in parts)
    sq_im = sum(p[2] for p in parts)
    count = sum(p[3] for p in parts)
    mean = total / count
    state = DensityMatrix(mean)
    if not return_stderr:
        return state
    var = (sq_re / count - mean.real ** 2) + (sq_im / count - mean.imag ** 2)
    stderr = np.sqrt(np.clip(var, 0, None) / max(count - 1, 1))
    return state, stderr


def smooth_sequential_state(spec, x, variational, smoothing):
    """Exact smoothed state: each layer is followed by its smoothing channel."""
    smoothing = as_smoothing(smoothing)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    channels = smoothing.channels(spec, x)
    for k, ch in enumerate(channels):
        if ch.dim != spec.dim:
            raise ValueError(f"Channel {k} has dimension {ch.dim}, register has {spec.dim}")
    return DensityMatrix(evolve(spec, x, slot_unitaries(spec, variational), channels=channels))
