"""
Hardware-efficient variational blocks placed in the slots of a sequential
encoding.
"""
import numpy as np

from ..encoding import RotationGate, rotation_unitary
from ..numerics import tensor_product

__all__ = ['BLOCK_KINDS', 'Ansatz', 'single_qubit_op', 'cx_chain']

# rotation axes applied per repetition, before the entangling chain
BLOCK_KINDS = {'two_local': ('Y', 'Z'),
               'real_amplitudes': ('Y',)}

_CX = np.array([[1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 0, 1],
                [0, 0, 1, 0]], dtype=complex)


def single_qubit_op(op, qubit, n_qubits):
    """Embed a 2x2 operator on ``qubit`` (qubit 0 is the most significant bit)."""
    return tensor_product(np.eye(2 ** qubit), op, np.eye(2 ** (n_qubits - qubit - 1)))


def cx_chain(n_qubits):
    """CX(0,1) CX(1,2) ... CX(n-2,n-1), applied in that order."""
    u = np.eye(2 ** n_qubits, dtype=complex)
    for q in range(n_qubits - 1):
        cx = tensor_product(np.eye(2 ** q), _CX, np.eye(2 ** (n_qubits - q - 2)))
        u = cx @ u
    return u


class Ansatz(object):
    """Variational blocks, one list of block kinds per encoding slot.

    Parameters
    ----------
    n_qubits : int
    blocks : list of list of str
        block kinds for every slot, in slot order; an empty list is the identity
    reps : int
        repetitions of (rotations, CX chain) inside every block

    The flat parameter vector holds, block by block and repetition by
    repetition, one angle per qubit for each rotation axis of the block kind.
    """

    def __init__(self, n_qubits, blocks, reps=1):
        self.n_qubits = int(n_qubits)
        if self.n_qubits < 1:
            raise ValueError(f"An ansatz needs at least one qubit, got {n_qubits}")
        self.reps = int(reps)
        if self.reps < 1:
            raise ValueError(f"Block repetitions must be at least 1, got {reps}")
        self.blocks = [list(b) for b in blocks]
        for slot in self.blocks:
            for kind in slot:
                if kind not in BLOCK_KINDS:
                    raise ValueError(f"Unknown block kind '{kind}', expected one of "
                                     f"{sorted(BLOCK_KINDS)}")
        self._entangler = cx_chain(self.n_qubits)

    @property
    def n_slots(self):
        return len(self.blocks)

    def block_params(self, kind):
        return self.reps * self.n_qubits * len(BLOCK_KINDS[kind])

    @property
    def n_params(self):
        return sum(self.block_params(k) for slot in self.blocks for k in slot)

    def init_params(self, seed=0):
        """Angles drawn uniformly from [0, 2 pi)."""
        return np.random.default_rng(seed).uniform(0, 2 * np.pi, self.n_params)

    def _block_unitary(self, kind, theta):
        n = self.n_qubits
        u = np.eye(2 ** n, dtype=complex)
        k = 0
        for _ in range(self.reps):
            for axis in BLOCK_KINDS[kind]:
                for q in range(n):
                    g = rotation_unitary(RotationGate(axis), theta[k])
                    u = single_qubit_op(g, q, n) @ u
                    k += 1
            u = self._entangler @ u
        return u

    def unitaries(self, theta):
        """One unitary per slot for the flat parameter vector ``theta``."""
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.n_params:
            raise ValueError(f"Ansatz has {self.n_params} parameters, got {theta.size}")
        out = []
        k = 0
        for slot in self.blocks:
            u = np.eye(2 ** self.n_qubits, dtype=complex)
            for kind in slot:
                m = self.block_params(kind)
                u = self._block_unitary(kind, theta[k:k + m]) @ u
                k += m
            out.append(u)
        return out

    def to_dict(self):
        return {'n_qubits': self.n_qubits, 'blocks': self.blocks, 'reps': self.reps}

    @classmethod
    def from_dict(cls, d):
        return cls(d['n_qubits'], d['blocks'], d.get('reps', 1))

    def __repr__(self):
        return '<Ansatz qubits=%d reps=%d blocks=%s>' % (self.n_qubits, self.reps, self.blocks)
