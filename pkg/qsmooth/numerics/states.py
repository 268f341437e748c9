"""
The ``DensityMatrix`` type: a validated, read-only quantum state.
"""
import numpy as np

from .linalg import hermitian_asymmetry

__all__ = ['DensityMatrix', 'InvalidStateError']

STATE_TOL = 1e-10


class InvalidStateError(ValueError):

    def __init__(self, message, check, value):
        self.message = message
        self.check = check
        self.value = value

    def __str__(self):
        return '%s [%s = %.3e]' % (self.message, self.check, self.value)


class DensityMatrix(object):
    """Positive semidefinite unit-trace matrix of dimension 2^d.

    The stored matrix is a private copy flagged read-only, so instances can be
    shared freely between threads.
    """

    def __init__(self, matrix, tol=STATE_TOL, validate=True):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"A density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim == 0 or dim & (dim - 1):
            raise ValueError(f"Density matrix dimension must be a power of two, got {dim}")
        if validate:
            self._validate(m, tol)
        m.flags.writeable = False
        self._matrix = m

    @staticmethod
    def _validate(m, tol):
        tr = np.trace(m)
        if abs(tr - 1) > tol:
            raise InvalidStateError('Density matrix trace differs from 1', 'trace', abs(tr - 1))
        asym = hermitian_asymmetry(m)
        if asym > tol:
            raise InvalidStateError('Density matrix is not Hermitian', 'max asymmetry', asym)
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
        if min_eig < -tol:
            raise InvalidStateError('Density matrix has a negative eigenvalue',
                                    'min eigenvalue', min_eig)

    @classmethod
    def from_pure(cls, vector):
        psi = np.asarray(vector, dtype=complex).ravel()
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1) > STATE_TOL:
            raise ValueError(f"State vector is not normalised (norm {nrm:.12f})")
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, index, dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1
        return cls(m)

    @classmethod
    def zero(cls, n_qubits):
        return cls.basis(0, 2 ** n_qubits)

    @classmethod
    def plus(cls, n_qubits):
        dim = 2 ** n_qubits
        return cls(np.full((dim, dim), 1.0 / dim, dtype=complex))

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    @property
    def n_qubits(self):
        return int(np.log2(self.dim))

    def purity(self):
        return float(np.real(np.trace(self._matrix @ self._matrix)))

    def expectation(self, operator):
        """Re Tr(O rho) for a Hermitian operator O."""
        return float(np.real(np.sum(np.asarray(operator).T * self._matrix)))

    def validate(self, tol=STATE_TOL):
        self._validate(self._matrix, tol)
        return self

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self._matrix, other._matrix)

    __hash__ = None

    def __repr__(self):
        return '<DensityMatrix dim=%d purity=%.6f>' % (self.dim, self.purity())
