"""
Standard-normal helpers shared by the certification code.
"""
import numpy as np
from scipy.stats import norm

__all__ = ['std_normal_cdf', 'std_normal_quantile']


def std_normal_cdf(x):
    """Phi(x) for scalars or arrays."""
    out = norm.cdf(x)
    return float(out) if np.ndim(out) == 0 else out


def std_normal_quantile(p):
    """Phi^{-1}(p); ``p`` must lie strictly inside (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0) or np.any(arr >= 1) or np.any(np.isnan(arr)):
        raise ValueError(f"Normal quantile requires 0 < p < 1, got {p}")
    out = norm.ppf(arr)
    return float(out) if np.ndim(out) == 0 else out
