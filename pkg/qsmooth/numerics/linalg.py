"""
Dense complex linear algebra used throughout qsmooth.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The routines here
add the checks the rest of the package relies on (hermiticity, unitarity) and
the few decompositions that need a specific convention.
"""
import logging
from functools import reduce

import numpy as np
from scipy import linalg as sla

__all__ = ['NotHermitianError', 'hermitian_asymmetry', 'check_hermitian', 'is_unitary',
           'check_unitary', 'eig_hermitian', 'trace_distance', 'tensor_product',
           'spectral_norm']

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12


class NotHermitianError(ValueError):

    def __init__(self, message, max_asymmetry):
        self.message = message
        self.max_asymmetry = max_asymmetry

    def __str__(self):
        return '%s (max |M - M^H| = %.3e)' % (self.message, self.max_asymmetry)


def hermitian_asymmetry(m):
    """Return max|M - M^H| for a square matrix."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, tol=HERMITIAN_TOL, name='matrix'):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    asym = hermitian_asymmetry(m)
    if asym > tol:
        raise NotHermitianError(f"{name} is not Hermitian", asym)
    return m


def is_unitary(u, tol=HERMITIAN_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def check_unitary(u, tol=HERMITIAN_TOL, name='matrix'):
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise ValueError(f"{name} is not unitary within {tol}")
    return u


def _jacobi_hermitian(m, tol=JACOBI_TOL, max_sweeps=100):
    """Cyclic Jacobi eigenvalue iteration for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` with a diagonal
    unitary and then applies the real symmetric Jacobi rotation, so the 2x2
    pivot block becomes diagonal. Only the two affected rows and columns are
    updated.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = a[p, q]
                r = abs(h)
                if r <= tol * scale * 1e-3:
                    continue
                phase = h / r
                theta = 0.5 * np.arctan2(2 * r, a[q, q].real - a[p, p].real)
                c, s = np.cos(theta), np.sin(theta)
                g = np.array([[c, s],
                              [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    else:
        log.warning('Jacobi iteration stopped after %d sweeps', max_sweeps)
    return np.real(np.diag(a)).copy(), v


def eig_hermitian(m, method='lapack', tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        square Hermitian matrix
    method : str
        ``'lapack'`` (default) calls ``scipy.linalg.eigh``;
        ``'jacobi'`` runs the cyclic Jacobi iteration.
    tol : float
        hermiticity tolerance of the input

    Returns
    -------
    Eigenvalues sorted in descending order and the unitary matrix whose
    columns are the matching eigenvectors.
    """
    m = check_hermitian(m, tol)
    # symmetrise so both solvers see an exactly Hermitian input
    m = 0.5 * (m + m.conj().T)
    if method == 'lapack':
        w, v = sla.eigh(m)
    elif method == 'jacobi':
        w, v = _jacobi_hermitian(m)
    else:
        raise ValueError(f"Unknown eigensolver '{method}'")
    order = np.argsort(w, kind='stable')[::-1]
    return w[order], v[:, order]


def trace_distance(a, b):
    """Half the Schatten-1 norm of ``a - b``; accepts arrays or DensityMatrix."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.sum(np.linalg.svd(a - b, compute_uv=False)))


def tensor_product(*mats):
    """Kronecker product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("tensor_product needs at least one matrix")
    return reduce(np.kron, [np.asarray(m) for m in mats])


def spectral_norm(m, tol=1e-15, max_iter=20000):
    """Largest singular value by power iteration on the smaller Gram matrix."""
    m = np.asarray(m)
    if m.size == 0 or not np.any(m):
        return 0.0
    gram = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
    vec = np.ones(gram.shape[0], dtype=gram.dtype) + np.linspace(0, 1, gram.shape[0])
    vec /= np.linalg.norm(vec)
    lam = 0.0
    for _ in range(max_iter):
        nxt = gram @ vec
        nrm = np.linalg.norm(nxt)
        if nrm == 0:
            # start vector orthogonal to the range; restart on a basis vector
            vec = np.zeros_like(vec)
            vec[np.argmax(np.abs(np.diag(gram)))] = 1.0
            continue
        vec = nxt / nrm
        new_lam = float(np.real(vec.conj() @ gram @ vec))
        if abs(new_lam - lam) <= tol * max(new_lam, 1.0):
            lam = new_lam
            break
        lam = new_lam
    return float(np.sqrt(max(lam, 0.0)))
