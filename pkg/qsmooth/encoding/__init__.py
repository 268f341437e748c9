"""
Hamiltonian data-encoding circuits:

- single-qubit rotation gates (RX, RY, RZ)
- parallel encoding layers, generic spectra or rotation stacks
- exponential and linear rotation layers
- sequential encodings with interleaved variational unitaries

"""
from .layers import (AXES, RotationGate, rotation_unitary, basis_change, EncodingLayer,
                     exponential_layer, linear_layer, parallel_state)
from .circuits import EncodingSpec, sequential_state, evolve, conjugate, slot_unitaries
