"""
Sequential encodings: repeated encoding layers interleaved with variational
unitaries, rho -> U_L W_L ... U_1 W_1 rho0 W_1^H U_1^H ... .
"""
import numpy as np

from ..numerics import DensityMatrix, check_unitary
from .layers import EncodingLayer

__all__ = ['EncodingSpec', 'sequential_state', 'evolve', 'conjugate', 'slot_unitaries']


def conjugate(rho, u):
    """u rho u^H, broadcasting over leading batch axes of ``rho`` and ``u``."""
    return u @ rho @ np.swapaxes(u.conj(), -1, -2)


def _apply_phases(rho, phases, basis=None):
    # rho_ij -> p_i rho_ij conj(p_j), optionally in a rotated basis
    if basis is not None:
        rho = conjugate(rho, basis.conj().T)
    rho = phases[..., :, None] * rho * phases[..., None, :].conj()
    if basis is not None:
        rho = conjugate(rho, basis)
    return rho


class EncodingSpec(object):
    """Layer plan of a sequential encoding circuit.

    Parameters
    ----------
    n_qubits : int
        register size d
    layers : list of EncodingLayer
        applied in order; every layer acts on the full register
    slots : list of int, optional
        positions of the variational unitaries; slot ``l`` sits right before
        layer ``l`` and slot ``L`` after the last layer. Default: every gap.
    initial_state : str or DensityMatrix
        ``'zero'`` (default), ``'plus'`` or an explicit state
    """

    def __init__(self, n_qubits, layers, slots=None, initial_state='zero'):
        self.n_qubits = int(n_qubits)
        if self.n_qubits < 1:
            raise ValueError(f"An encoding needs at least one qubit, got {n_qubits}")
        self.layers = list(layers)
        if not self.layers:
            raise ValueError("An encoding needs at least one layer")
        for k, layer in enumerate(self.layers):
            if layer.dim != self.dim:
                raise ValueError(f"Layer {k} has dimension {layer.dim}, register has {self.dim}")
        self.slots = slots
        self.initial_state = initial_state

    @property
    def dim(self):
        return 2 ** self.n_qubits

    @property
    def n_layers(self):
        return len(self.layers)

    @property
    def slots(self):
        return self._slots

    @slots.setter
    def slots(self, slots):
        if slots is None:
            slots = range(self.n_layers + 1)
        slots = sorted(set(int(s) for s in slots))
        bad = [s for s in slots if s < 0 or s > self.n_layers]
        if bad:
            raise ValueError(f"Variational slots {bad} do not reference a gap between "
                             f"{self.n_layers} layers")
        self._slots = tuple(slots)

    @property
    def initial_state(self):
        return self._initial_state

    @initial_state.setter
    def initial_state(self, state):
        if isinstance(state, DensityMatrix):
            if state.dim != self.dim:
                raise ValueError(f"Initial state has dimension {state.dim}, register has {self.dim}")
            self._initial_kind = 'custom'
            self._initial_state = state
        elif state == 'zero':
            self._initial_kind = state
            self._initial_state = DensityMatrix.zero(self.n_qubits)
        elif state == 'plus':
            self._initial_kind = state
            self._initial_state = DensityMatrix.plus(self.n_qubits)
        else:
            raise ValueError(f"Unknown initial state '{state}'")

    @property
    def features(self):
        """Sorted input indices referenced by any layer."""
        return sorted(set(f for layer in self.layers for f in layer.features))

    @property
    def n_features(self):
        return max(self.features) + 1

    def layers_for(self, feature):
        return [layer for layer in self.layers if feature in layer.features]

    def to_dict(self):
        d = {'n_qubits': self.n_qubits,
             'layers': [layer.to_dict() for layer in self.layers],
             'slots': list(self._slots),
             'initial_state': self._initial_kind}
        if self._initial_kind == 'custom':
            d['initial_matrix'] = {'real': self._initial_state.matrix.real.tolist(),
                                   'imag': self._initial_state.matrix.imag.tolist()}
        return d

    @classmethod
    def from_dict(cls, d):
        init = d.get('initial_state', 'zero')
        if init == 'custom':
            m = d['initial_matrix']
            init = DensityMatrix(np.asarray(m['real']) + 1j * np.asarray(m['imag']))
        return cls(d['n_qubits'], [EncodingLayer.from_dict(ld) for ld in d['layers']],
                   slots=d.get('slots'), initial_state=init)

    def __repr__(self):
        return '<EncodingSpec qubits=%d layers=%d slots=%s>' % (self.n_qubits, self.n_layers,
                                                              list(self._slots))


def slot_unitaries(spec, variational):
    if variational is None:
        return {}
    variational = list(variational)
    if len(variational) != len(spec.slots):
        raise ValueError(f"Got {len(variational)} variational unitaries for "
                         f"{len(spec.slots)} slots")
    out = {}
    for slot, u in zip(spec.slots, variational):
        u = check_unitary(u, name=f"variational block at slot {slot}")
        if u.shape[0] != spec.dim:
            raise ValueError(f"Variational block at slot {slot} has dimension {u.shape[0]}, "
                             f"register has {spec.dim}")
        out[slot] = u
    return out


def evolve(spec, x=None, unitaries=None, channels=None, phases=None, rho=None):
    """Run the circuit and return the raw state matrix.

    ``phases`` overrides the per-layer diagonal phases (one entry per layer,
    each of shape ``(dim,)`` or ``(batch, dim)``); otherwise they are computed
    from ``x``. ``channels`` is an optional list with one QuantumChannel (or
    None) applied after each layer. ``unitaries`` maps slot -> matrix.
    """
    unitaries = unitaries or {}
    if rho is None:
        rho = np.array(spec.initial_state.matrix)
    for k, layer in enumerate(spec.layers):
        if k in unitaries:
            rho = conjugate(rho, unitaries[k])
        p = layer.phases(layer.feature_value(x)) if phases is None else phases[k]
        if np.ndim(p) > 1 and rho.ndim == 2:
            rho = np.broadcast_to(rho, p.shape[:-1] + rho.shape)
        rho = _apply_phases(rho, p, layer.basis)
        if channels is not None and channels[k] is not None:
            rho = channels[k].apply_matrix(rho)
    if spec.n_layers in unitaries:
        rho = conjugate(rho, unitaries[spec.n_layers])
    return rho


def sequential_state(spec, x, variational=None):
    """State after the full sequential encoding at input ``x``.

    Parameters
    ----------
    spec : EncodingSpec
    x : array_like
        input vector; must cover every referenced feature index
    variational : list of array_like, optional
        one unitary per slot in ``spec.slots``; identities when omitted
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return DensityMatrix(evolve(spec, x, slot_unitaries(spec, variational)))
