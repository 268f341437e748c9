"""
Built-in consistency checks of the smoothing identities and certificates,
run by ``qsmooth selftest``.
"""
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from ..certify import gaussian_parallel_bound, gaussian_sequential_bound, radius_exponential
from ..encoding import EncodingLayer, EncodingSpec, exponential_layer, parallel_state
from ..numerics import std_normal_cdf, std_normal_quantile, trace_distance
from ..smoothing import (Distribution, Smoothing, apply_channel, build_A, kraus_from_A,
                         mc_smoothed_state, pd_param, phase_damping, smooth_sequential_state)

__all__ = ['CheckResult', 'SelftestReport', 'CHECKS', 'run_selftest']

log = logging.getLogger(__name__)

TOL = 1e-9


class CheckResult(BaseModel):
    id: str
    theorem: Optional[str] = None
    passed: bool
    detail: str


class SelftestReport(BaseModel):
    passed: bool
    checks: List[CheckResult]


def _random_layer(rng, n_qubits=2):
    return EncodingLayer(eigenvalues=rng.normal(0, 1, 2 ** n_qubits), feature=0)


def _random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def check_channel_expectation(rng):
    """Smoothing channel on rho(x) equals the closed-form noise average."""
    dist = Distribution('gaussian', sigma=0.7)
    layer = _random_layer(rng)
    gamma = _random_state(rng, layer.dim)
    rho = parallel_state(layer, 0.3, gamma)
    out = apply_channel(kraus_from_A(build_A(dist, layer.eigenvalues)), rho).matrix
    lam = layer.eigenvalues
    expected = rho.matrix * np.exp(-0.5 * 0.49 * (lam[:, None] - lam[None, :]) ** 2)
    err = float(np.max(np.abs(out - expected)))
    return err < 1e-10, 'max deviation %.2e' % err


def check_kraus_completeness(rng):
    worst = 0.0
    for dist in (Distribution('gaussian', sigma=0.4), Distribution('uniform', width=1.3)):
        for _ in range(5):
            ch = kraus_from_A(build_A(dist, _random_layer(rng, 3).eigenvalues))
            worst = max(worst, ch.completeness_error())
    return worst < 1e-10, 'max completeness error %.2e' % worst


def check_parallel_bound(rng):
    sigma = 0.5
    dist = Distribution('gaussian', sigma=sigma)
    layer = _random_layer(rng)
    ch = kraus_from_A(build_A(dist, layer.eigenvalues))
    gamma = _random_state(rng, layer.dim)
    slack = np.inf
    for x, y in rng.uniform(-2, 2, (20, 2)):
        d = trace_distance(apply_channel(ch, parallel_state(layer, x, gamma)).matrix,
                           apply_channel(ch, parallel_state(layer, y, gamma)).matrix)
        slack = min(slack, gaussian_parallel_bound(sigma, x, y).value - d)
    return slack >= -TOL, 'minimum slack %.3e' % slack


def _sequential_spec(n_layers=3):
    layers = [exponential_layer(2, 0) for _ in range(n_layers)]
    return EncodingSpec(2, layers, slots=[], initial_state='plus')


def check_sequential_expectation(rng):
    spec = _sequential_spec()
    smoothing = Smoothing(Distribution('gaussian', sigma=0.4), 'layer')
    exact = smooth_sequential_state(spec, [0.7], None, smoothing).matrix
    mc, se = mc_smoothed_state(spec, [0.7], None, smoothing, samples=20000,
                               seed=int(rng.integers(1 << 31)), return_stderr=True)
    z = float(np.max(np.abs(mc.matrix - exact) / (se + 1e-12)))
    return z < 5, 'max deviation %.2f standard errors' % z


def check_sequential_bound(rng):
    sigma, n_layers = 0.6, 3
    spec = _sequential_spec(n_layers)
    smoothing = Smoothing(Distribution('gaussian', sigma=sigma), 'layer')
    slack = np.inf
    for x, y in rng.uniform(-1.5, 1.5, (10, 2)):
        d = trace_distance(smooth_sequential_state(spec, [x], None, smoothing).matrix,
                           smooth_sequential_state(spec, [y], None, smoothing).matrix)
        slack = min(slack, gaussian_sequential_bound(sigma, n_layers, x, y).value - d)
    return slack >= -TOL, 'minimum slack %.3e' % slack


def check_phase_damping_rz(rng):
    dist = Distribution('gaussian', sigma=0.8)
    scale = 2.0
    layer = EncodingLayer(qubit_scales=[scale], feature=0)
    rho = parallel_state(layer, float(rng.uniform(-1, 1)))
    pd = apply_channel(phase_damping(pd_param(dist, scale)), rho).matrix
    full = apply_channel(kraus_from_A(build_A(dist, layer.eigenvalues)), rho).matrix
    err = float(np.max(np.abs(pd - full)))
    return err < 1e-10, 'max deviation %.2e' % err


def check_smoothing_matrix_psd(rng):
    worst = np.inf
    for dist in (Distribution('gaussian', sigma=0.3), Distribution('uniform', width=2.0)):
        for _ in range(5):
            worst = min(worst, build_A(dist, _random_layer(rng, 3).eigenvalues).min_eigenvalue())
    return worst >= -1e-10, 'minimum eigenvalue %.3e' % worst


def check_gaussian_radius(rng):
    r = radius_exponential(0.5, 1, 0.975)
    ok = abs(r - 0.5 * std_normal_quantile(0.975)) < 1e-12 and abs(r - 0.979982) < 1e-5
    ok = ok and radius_exponential(0.5, 1, 0.5) == 0.0
    return ok, 'radius %.6f at sigma=0.5, p=0.975' % r


def check_sequential_radius(rng):
    r1 = radius_exponential(0.8, 1, 0.9)
    r4 = radius_exponential(0.8, 4, 0.9)
    return abs(r4 - 0.5 * r1) < 1e-12, 'L=1 %.6f, L=4 %.6f' % (r1, r4)


def check_normal_quantile(rng):
    p = np.linspace(0.01, 0.99, 99)
    err = float(np.max(np.abs(std_normal_cdf(std_normal_quantile(p)) - p)))
    ok = err < 1e-12 and abs(std_normal_quantile(0.975) - 1.959963985) < 1e-8
    ok = ok and std_normal_quantile(0.8) > 0 > std_normal_quantile(0.2)
    return ok, 'max round-off %.2e' % err


CHECKS = [('channel_expectation', 'Thm1a', check_channel_expectation),
          ('kraus_completeness', 'Thm1b', check_kraus_completeness),
          ('parallel_bound', 'Thm2', check_parallel_bound),
          ('sequential_expectation', 'Thm3a', check_sequential_expectation),
          ('sequential_bound', 'Thm3b', check_sequential_bound),
          ('phase_damping_rz', 'Thm4', check_phase_damping_rz),
          ('smoothing_matrix_psd', 'Lemma1', check_smoothing_matrix_psd),
          ('gaussian_radius', 'Cor1', check_gaussian_radius),
          ('sequential_radius', 'Cor2', check_sequential_radius),
          ('normal_quantile', None, check_normal_quantile)]


def run_selftest(seed=0, checks=None):
    """Run every check and collect a report.

    ``checks`` replaces the built-in table with ``(id, theorem, function)``
    triples; ``theorem`` is the result it exercises, or None.
    """
    results = []
    for check_id, theorem, fn in (CHECKS if checks is None else checks):
        rng = np.random.default_rng([seed, len(results)])
        try:
            passed, detail = fn(rng)
        except Exception as err:
            passed, detail = False, 'raised %s: %s' % (type(err).__name__, err)
        log.info('%-24s %s  %s', check_id, 'ok' if passed else 'FAILED', detail)
        results.append(CheckResult(id=check_id, theorem=theorem, passed=bool(passed),
                                   detail=detail))
    return SelftestReport(passed=all(r.passed for r in results), checks=results)
