"""
Certified L2 radii and the Clopper-Pearson lower bound on the class probability.
"""
import numpy as np
from scipy import stats

from ..numerics import std_normal_cdf, std_normal_quantile

__all__ = ['UNIFORM_FORMULAS', 'radius_exponential', 'radius_uniform', 'radius_from_weights',
           'threshold_adjusted', 'clopper_pearson_lower']

UNIFORM_FORMULAS = ('conservative', 'compact')
P_MAX = 1 - 1e-12


def _check_probability(p):
    if not 0 < p < 1:
        raise ValueError(f"Probability bound must lie in (0, 1), got {p}")


def radius_exponential(sigma, n_layers, p_lower):
    """sigma / sqrt(L) * Phi^-1(p), zero when p <= 1/2.

    With one independent draw per gate, pass the number of gates carrying the
    feature as ``n_layers``.
    """
    _check_probability(p_lower)
    if n_layers <= 0:
        raise ValueError(f"Layer count must be positive, got {n_layers}")
    if p_lower <= 0.5:
        return 0.0
    return float(sigma / np.sqrt(n_layers) * std_normal_quantile(p_lower))


def radius_uniform(sigma, n_layers, n_qubits, p_lower, formula='conservative'):
    """Radius when every gate of an exponential layer is smoothed by the same law.

    ``'conservative'`` divides by sqrt(L (4^N - 1) / 3), the exact sum of the
    squared gate scales 1, 2, ..., 2^(N-1) over L layers; ``'compact'`` divides
    by sqrt(4^(N-1) L / 3).
    """
    _check_probability(p_lower)
    if n_qubits < 1 or n_layers < 1:
        raise ValueError(f"Need at least one layer and one qubit, got L={n_layers}, "
                         f"N={n_qubits}")
    if formula == 'conservative':
        denom = n_layers * (4.0 ** n_qubits - 1) / 3
    elif formula == 'compact':
        denom = 4.0 ** (n_qubits - 1) * n_layers / 3
    else:
        raise ValueError(f"Unknown uniform radius formula '{formula}', expected one of "
                         f"{UNIFORM_FORMULAS}")
    if p_lower <= 0.5:
        return 0.0
    return float(sigma / np.sqrt(denom) * std_normal_quantile(p_lower))


def radius_from_weights(sigma, weights, p_lower):
    """sigma Phi^-1(p) / sqrt(max_f w_f) for per-feature noise weights."""
    _check_probability(p_lower)
    w = max(weights.values()) if isinstance(weights, dict) else float(np.max(weights))
    if w <= 0:
        raise ValueError("Noise weights must be positive")
    if p_lower <= 0.5:
        return 0.0
    return float(sigma * std_normal_quantile(p_lower) / np.sqrt(w))


def threshold_adjusted(p, threshold):
    """Phi(Phi^-1(p) - Phi^-1(t)): the probability whose radius matches deciding at ``t``."""
    p = min(p, P_MAX)
    if threshold == 0.5:
        return p
    return float(min(std_normal_cdf(std_normal_quantile(p) - std_normal_quantile(threshold)),
                     P_MAX))


def clopper_pearson_lower(successes, trials, alpha=0.05):
    """One-sided exact binomial lower confidence bound at level 1 - alpha."""
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"Successes must lie in [0, {trials}], got {successes}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if successes == 0:
        return 0.0
    return float(stats.beta.ppf(alpha, successes, trials - successes + 1))
