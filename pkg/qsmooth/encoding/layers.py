"""
Single encoding layers: diagonal Hamiltonian blocks and the rotation-gate
stacks (RZ, or RX/RY by a basis change) used by the experiments.
"""
import numpy as np

from ..numerics import DensityMatrix, tensor_product

__all__ = ['AXES', 'RotationGate', 'rotation_unitary', 'basis_change', 'qubit_signs',
           'EncodingLayer', 'exponential_layer', 'linear_layer', 'parallel_state']

AXES = ('X', 'Y', 'Z')

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# columns are the +1 and -1 eigenvectors of Pauli-Y
V_Y = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)


def basis_change(axis):
    """2x2 unitary V with P = V Z V^H for the Pauli of the given axis."""
    if axis == 'Z':
        return np.eye(2, dtype=complex)
    elif axis == 'X':
        return HADAMARD
    elif axis == 'Y':
        return V_Y
    else:
        raise ValueError(f"Unknown rotation axis '{axis}'")


class RotationGate(object):
    """A single-qubit Pauli rotation whose angle is ``scale * x[feature]``."""

    def __init__(self, axis='Z', feature=0, scale=1.0):
        if axis not in AXES:
            raise ValueError(f"Unknown rotation axis '{axis}'")
        self.axis = axis
        self.feature = int(feature)
        self.scale = float(scale)

    def __repr__(self):
        return 'R%s(%g*x[%d])' % (self.axis, self.scale, self.feature)


def rotation_unitary(gate, x):
    """2x2 unitary of ``gate`` at feature value ``x``.

    RZ(t) = diag(exp(-i t/2), exp(i t/2)); RX and RY are obtained by
    conjugating with H and V_Y.
    """
    theta = gate.scale * x
    rz = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    v = basis_change(gate.axis)
    return v @ rz @ v.conj().T


def qubit_signs(n_qubits):
    """Matrix of (1/2 - b_q(i)) for basis index i and qubit q (qubit 0 is the MSB)."""
    idx = np.arange(2 ** n_qubits)[:, None]
    shifts = n_qubits - 1 - np.arange(n_qubits)[None, :]
    bits = (idx >> shifts) & 1
    return 0.5 - bits


class EncodingLayer(object):
    """One parallel encoding block exp(-i alpha f(x) H) with diagonal H.

    A layer is either a generic spectrum (``eigenvalues`` given) or a stack of
    single-qubit rotations (``qubit_scales`` given, one scale per qubit of the
    register, zero on untouched qubits). ``feature`` is an input index or a
    pair ``(i, j)`` for the product feature x_i * x_j.
    """

    def __init__(self, eigenvalues=None, feature=0, scale=1.0, qubit_scales=None, axis='Z'):
        if (eigenvalues is None) == (qubit_scales is None):
            raise ValueError("Give exactly one of eigenvalues or qubit_scales")
        if axis not in AXES:
            raise ValueError(f"Unknown rotation axis '{axis}'")
        if qubit_scales is not None:
            qs = np.asarray(qubit_scales, dtype=float).ravel()
            if qs.size < 1:
                raise ValueError("qubit_scales must name at least one qubit")
            self._qubit_scales = qs
            self._signs = qubit_signs(qs.size)
            lam = self._signs @ qs
        else:
            if axis != 'Z':
                raise ValueError("Generic spectra are diagonal; fold basis changes into the "
                                 "variational blocks")
            lam = np.asarray(eigenvalues, dtype=float).ravel()
            self._qubit_scales = None
            self._signs = None
        dim = lam.size
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"Eigenvalue vector length must be a power of two, got {dim}")
        lam.flags.writeable = False
        self._eigenvalues = lam
        self._feature = self._check_feature(feature)
        self._scale = float(scale)
        self._axis = axis
        self._basis = None

    @staticmethod
    def _check_feature(feature):
        if isinstance(feature, (tuple, list, np.ndarray)):
            if len(feature) != 2:
                raise ValueError(f"A product feature needs two indices, got {feature}")
            return (int(feature[0]), int(feature[1]))
        return int(feature)

    @property
    def eigenvalues(self):
        return self._eigenvalues

    @property
    def qubit_scales(self):
        return self._qubit_scales

    @property
    def feature(self):
        return self._feature

    @property
    def scale(self):
        return self._scale

    @property
    def axis(self):
        return self._axis

    @property
    def dim(self):
        return self._eigenvalues.size

    @property
    def n_qubits(self):
        return int(np.log2(self.dim))

    @property
    def is_rotation_stack(self):
        return self._qubit_scales is not None

    @property
    def is_product(self):
        return isinstance(self._feature, tuple)

    @property
    def features(self):
        return self._feature if self.is_product else (self._feature,)

    @property
    def touched_qubits(self):
        if self._qubit_scales is None:
            return np.arange(self.n_qubits)
        return np.flatnonzero(self._qubit_scales)

    def feature_value(self, x):
        x = np.asarray(x, dtype=float)
        for f in self.features:
            if f < 0 or f >= x.shape[-1]:
                raise ValueError(f"Input has {x.shape[-1]} features, layer needs index {f}")
        if self.is_product:
            return x[..., self._feature[0]] * x[..., self._feature[1]]
        return x[..., self._feature]

    def phases(self, value):
        """Diagonal of exp(-i alpha value H); vectorised over a leading axis of ``value``."""
        value = np.asarray(value, dtype=float)
        return np.exp(-1j * self._scale * np.multiply.outer(value, self._eigenvalues))

    def gate_angles(self, value):
        """Per-qubit rotation angles alpha * s_q * value (rotation stacks only)."""
        if not self.is_rotation_stack:
            raise ValueError("Gate angles exist only for rotation-stack layers")
        return self._scale * np.multiply.outer(np.asarray(value, dtype=float), self._qubit_scales)

    def phases_from_angles(self, angles):
        """Diagonal phases of the RZ stack for explicit per-qubit angles (..., n_qubits)."""
        return np.exp(-1j * (np.asarray(angles, dtype=float) @ self._signs.T))

    @property
    def basis(self):
        """Basis change V so the layer unitary is V diag(phases) V^H; None for Z."""
        if self._axis == 'Z':
            return None
        if self._basis is None:
            single = [basis_change(self._axis) if s != 0 else np.eye(2)
                      for s in self._qubit_scales]
            self._basis = tensor_product(*single)
        return self._basis

    def unitary(self, value):
        u = np.diag(self.phases(value))
        v = self.basis
        return u if v is None else v @ u @ v.conj().T

    def to_dict(self):
        return {'eigenvalues': None if self.is_rotation_stack else self._eigenvalues.tolist(),
                'qubit_scales': None if not self.is_rotation_stack else self._qubit_scales.tolist(),
                'feature': list(self._feature) if self.is_product else self._feature,
                'scale': self._scale,
                'axis': self._axis}

    @classmethod
    def from_dict(cls, d):
        return cls(eigenvalues=d.get('eigenvalues'), feature=d['feature'], scale=d.get('scale', 1.0),
                   qubit_scales=d.get('qubit_scales'), axis=d.get('axis', 'Z'))

    def __repr__(self):
        kind = 'rotations' if self.is_rotation_stack else 'spectrum'
        return '<EncodingLayer %s dim=%d feature=%s axis=%s>' % (kind, self.dim, self._feature,
                                                                  self._axis)


def exponential_layer(n, feature, first_qubit=0, n_qubits=None, axis='Z', scale=1.0):
    """Stack of R(2^k x) gates on ``n`` consecutive qubits starting at ``first_qubit``.

    Parameters
    ----------
    n : int
        number of qubits carrying the feature; qubit k of the block gets scale 2^k
    feature : int or tuple
        encoded input index (or index pair for a product feature)
    first_qubit : int
        position of the block in the register
    n_qubits : int, optional
        register size, default ``first_qubit + n``
    """
    if n < 1:
        raise ValueError(f"An exponential layer needs at least one qubit, got {n}")
    n_qubits = first_qubit + n if n_qubits is None else n_qubits
    if first_qubit < 0 or first_qubit + n > n_qubits:
        raise ValueError(f"Qubits {first_qubit}..{first_qubit + n - 1} do not fit in a "
                         f"{n_qubits}-qubit register")
    scales = np.zeros(n_qubits)
    scales[first_qubit:first_qubit + n] = 2.0 ** np.arange(n)
    return EncodingLayer(qubit_scales=scales, feature=feature, axis=axis, scale=scale)


def linear_layer(qubits, feature, n_qubits, axis='Z', scale=1.0):
    """Unit-scale rotations of one feature on the listed qubits."""
    qubits = np.atleast_1d(qubits).astype(int)
    if qubits.size == 0 or qubits.min() < 0 or qubits.max() >= n_qubits:
        raise ValueError(f"Qubits {qubits.tolist()} do not fit in a {n_qubits}-qubit register")
    scales = np.zeros(n_qubits)
    scales[qubits] = 1.0
    return EncodingLayer(qubit_scales=scales, feature=feature, axis=axis, scale=scale)


def parallel_state(layer, x, gamma=None):
    """Density matrix U(x)|gamma><gamma|U(x)^H of a single encoding block.

    ``gamma`` defaults to the uniform superposition.
    """
    dim = layer.dim
    if gamma is None:
        gamma = np.full(dim, 1 / np.sqrt(dim), dtype=complex)
    gamma = np.asarray(gamma, dtype=complex).ravel()
    if gamma.size != dim:
        raise ValueError(f"gamma has {gamma.size} amplitudes, layer dimension is {dim}")
    nrm = np.linalg.norm(gamma)
    if abs(nrm - 1) > 1e-10:
        raise ValueError(f"gamma is not normalised (norm {nrm:.12f})")
    psi = layer.unitary(x) @ gamma
    return DensityMatrix(np.outer(psi, psi.conj()))
