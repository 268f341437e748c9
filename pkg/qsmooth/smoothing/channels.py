"""
Smoothing as quantum channels.

Averaging a diagonal encoding over noise multiplies the state pointwise by the
matrix A[i, j] = phi(lambda_j - lambda_i). ``build_A`` forms that matrix,
``kraus_from_A`` turns it into diagonal Kraus operators, and the phase-damping
helpers cover the single-qubit rotation case.
"""
import logging

import numpy as np

from ..numerics import (DensityMatrix, eig_hermitian, hermitian_asymmetry, check_unitary,
                        tensor_product)

__all__ = ['PSDViolationError', 'SmoothingMatrix', 'QuantumChannel', 'build_A', 'kraus_from_A',
           'apply_channel', 'phase_damping', 'pd_param', 'conjugated_channel', 'identity_channel']

log = logging.getLogger(__name__)

CHANNEL_TOL = 1e-10
RANK_CUTOFF = 1e-12


class PSDViolationError(ValueError):

    def __init__(self, message, min_eigenvalue):
        self.message = message
        self.min_eigenvalue = min_eigenvalue

    def __str__(self):
        return '%s (min eigenvalue %.3e)' % (self.message, self.min_eigenvalue)


class SmoothingMatrix(object):
    """Hermitian, unit-diagonal attenuation matrix of a smoothing channel."""

    def __init__(self, matrix, tol=CHANNEL_TOL):
        a = np.array(matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"Smoothing matrix must be square, got shape {a.shape}")
        asym = hermitian_asymmetry(a)
        if asym > tol:
            raise ValueError(f"Smoothing matrix is not Hermitian (max asymmetry {asym:.3e})")
        if np.max(np.abs(np.diag(a) - 1)) > tol:
            raise ValueError("Smoothing matrix must have a unit diagonal")
        a.flags.writeable = False
        self._matrix = a

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh(self._matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)


class QuantumChannel(object):
    """A CPTP map in Kraus form, rho -> sum_k E_k rho E_k^H.

    Parameters
    ----------
    kraus : list of array_like
        Kraus operators, all square of the same dimension
    label : dict, optional
        provenance (distribution, layer, strategy); serialised instead of the
        raw matrices
    """

    def __init__(self, kraus, label=None, check=True):
        ops = np.array([np.asarray(k, dtype=complex) for k in kraus])
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] == 0:
            raise ValueError("Kraus operators must be a non-empty list of equal square matrices")
        ops.flags.writeable = False
        self._kraus = ops
        self.label = dict(label or {})
        self._diagonal = all(np.count_nonzero(k - np.diag(np.diag(k))) == 0 for k in ops)
        self._pointwise = None
        if check:
            err = self.completeness_error()
            if err > CHANNEL_TOL:
                raise ValueError(f"Kraus operators are not trace preserving (error {err:.3e})")

    @property
    def kraus(self):
        return self._kraus

    @property
    def dim(self):
        return self._kraus.shape[1]

    @property
    def n_kraus(self):
        return self._kraus.shape[0]

    @property
    def is_diagonal(self):
        return self._diagonal

    def completeness_error(self):
        """max |sum_k E_k^H E_k - I|."""
        s = np.einsum('kji,kjl->il', self._kraus.conj(), self._kraus)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def pointwise_matrix(self):
        """M with E(rho) = rho * M (elementwise); only for diagonal Kraus sets."""
        if not self._diagonal:
            raise ValueError("Only diagonal channels act as a pointwise product")
        if self._pointwise is None:
            d = np.einsum('kii->ki', self._kraus)
            m = d.T @ d.conj()
            m.flags.writeable = False
            self._pointwise = m
        return self._pointwise

    def apply_matrix(self, rho):
        """Apply to a raw matrix or a batch of matrices (..., dim, dim)."""
        if rho.shape[-1] != self.dim:
            raise ValueError(f"Channel dimension {self.dim} does not match state {rho.shape[-1]}")
        if self._diagonal:
            return rho * self.pointwise_matrix()
        return np.einsum('kij,...jl,kml->...im', self._kraus, rho, self._kraus.conj())

    def apply(self, rho):
        return apply_channel(self, rho)

    def compose(self, other):
        """Channel applying ``self`` first and then ``other``."""
        if other.dim != self.dim:
            raise ValueError(f"Cannot compose channels of dimension {self.dim} and {other.dim}")
        ops = [f @ e for f in other.kraus for e in self._kraus]
        ops = [k for k in ops if np.any(np.abs(k) > 0)]
        label = {'composed': [self.label, other.label]}
        return QuantumChannel(ops, label=label)

    def embed(self, qubit, n_qubits):
        """Extend a single-qubit channel to ``qubit`` of an n-qubit register."""
        if self.dim != 2:
            raise ValueError("Only single-qubit channels can be embedded")
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"Qubit {qubit} is outside a {n_qubits}-qubit register")
        left = np.eye(2 ** qubit)
        right = np.eye(2 ** (n_qubits - qubit - 1))
        ops = [tensor_product(left, k, right) for k in self._kraus]
        return QuantumChannel(ops, label=dict(self.label, qubit=qubit))

    def __repr__(self):
        return '<QuantumChannel dim=%d kraus=%d %s>' % (self.dim, self.n_kraus, self.label)


def identity_channel(dim):
    return QuantumChannel([np.eye(dim)], label={'kind': 'identity'})


def build_A(dist, eigenvalues):
    """Smoothing matrix A[i, j] = phi(lambda_j - lambda_i) for a noise law and spectrum."""
    if abs(float(dist.characteristic(0.0)) - 1) > 1e-12:
        raise ValueError("The characteristic function must equal 1 at t = 0")
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    diff = lam[None, :] - lam[:, None]
    return SmoothingMatrix(dist.characteristic(diff))


def kraus_from_A(A, cutoff=RANK_CUTOFF, label=None):
    """Diagonal Kraus operators E_k = sqrt(s_k) diag(u_k) from the spectral decomposition of A.

    Eigenpairs with s_k <= cutoff * max(s) are dropped.
    """
    a = A.matrix if isinstance(A, SmoothingMatrix) else np.asarray(A)
    w, v = eig_hermitian(a)
    if w[-1] < -CHANNEL_TOL:
        raise PSDViolationError('Smoothing matrix is not positive semidefinite', float(w[-1]))
    keep = w > cutoff * w[0]
    ops = [np.sqrt(s) * np.diag(u) for s, u in zip(w[keep], v[:, keep].T)]
    log.debug('kraus_from_A: kept %d of %d eigenpairs', len(ops), w.size)
    return QuantumChannel(ops, label=label)


def apply_channel(ch, rho):
    """Apply ``ch`` to a DensityMatrix and return the output state."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape[-1] != ch.dim:
        raise ValueError(f"Channel dimension {ch.dim} does not match state dimension {m.shape[-1]}")
    return DensityMatrix(ch.apply_matrix(m))


def phase_damping(lam):
    """Single-qubit phase damping: off-diagonals scaled by sqrt(1 - lam)."""
    if not 0 <= lam <= 1:
        raise ValueError(f"Phase-damping parameter must lie in [0, 1], got {lam}")
    return QuantumChannel([np.diag([1.0, np.sqrt(1 - lam)]), np.diag([0.0, np.sqrt(lam)])],
                          label={'kind': 'phase_damping', 'lambda': float(lam)})


def pd_param(dist, scale):
    """Phase-damping parameter 1 - phi(scale)^2 matching RZ(scale * x) smoothing."""
    phi = float(dist.characteristic(scale))
    return float(np.clip(1 - phi ** 2, 0.0, 1.0))


def conjugated_channel(ch, v):
    """Channel with Kraus operators V E_k V^H."""
    v = check_unitary(v, name='V')
    if v.shape[0] != ch.dim:
        raise ValueError(f"V has dimension {v.shape[0]}, channel has {ch.dim}")
    ops = [v @ k @ v.conj().T for k in ch.kraus]
    return QuantumChannel(ops, label=dict(ch.label, conjugated=True))
