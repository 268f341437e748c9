import numpy as np
import pytest

from qsmooth.encoding import (EncodingLayer, EncodingSpec, RotationGate, exponential_layer,
                              linear_layer, parallel_state, rotation_unitary, sequential_state)
from qsmooth.numerics import DensityMatrix, tensor_product

PAULI = {'X': np.array([[0, 1], [1, 0]], dtype=complex),
         'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
         'Z': np.diag([1, -1]).astype(complex)}


def _expm_pauli(axis, theta):
    # exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * PAULI[axis]


@pytest.mark.parametrize('axis', ['X', 'Y', 'Z'])
def test_rotation_unitary(axis):
    for theta in np.linspace(-4, 4, 9):
        u = rotation_unitary(RotationGate(axis, scale=2.0), theta / 2)
        assert np.allclose(u, _expm_pauli(axis, theta), atol=1e-12)


def test_exponential_layer_matches_gate_product():
    """The diagonal phases reproduce the tensor product of RZ(2^k x) gates."""
    n, x = 3, 0.37
    layer = exponential_layer(n, feature=0)
    gates = [rotation_unitary(RotationGate('Z', scale=2.0 ** k), x) for k in range(n)]
    assert np.allclose(layer.unitary(x), tensor_product(*gates), atol=1e-12)
    # eigenvalues are sum_q 2^q (1/2 - b_q) with qubit 0 the most significant bit
    assert np.allclose(layer.eigenvalues[[0, -1]], [3.5, -3.5])
    assert layer.eigenvalues[1] == pytest.approx(0.5 + 1 - 2)


def test_exponential_layer_placement():
    layer = exponential_layer(2, feature=1, first_qubit=3, n_qubits=6)
    assert layer.n_qubits == 6
    assert list(layer.touched_qubits) == [3, 4]
    assert np.allclose(layer.qubit_scales, [0, 0, 0, 1, 2, 0])
    with pytest.raises(ValueError):
        exponential_layer(4, 0, first_qubit=3, n_qubits=6)
    with pytest.raises(ValueError):
        exponential_layer(0, 0)


@pytest.mark.parametrize('axis', ['X', 'Y'])
def test_basis_rotated_layer(axis):
    layer = linear_layer([0, 2], feature=0, n_qubits=3, axis=axis)
    x = -0.8
    g = rotation_unitary(RotationGate(axis), x)
    expected = tensor_product(g, np.eye(2), g)
    assert np.allclose(layer.unitary(x), expected, atol=1e-12)


def test_layer_validation():
    with pytest.raises(ValueError):
        EncodingLayer()
    with pytest.raises(ValueError):
        EncodingLayer(eigenvalues=[0, 1, 2])
    with pytest.raises(ValueError):
        EncodingLayer(eigenvalues=[0, 1], axis='X')
    with pytest.raises(ValueError):
        EncodingLayer(eigenvalues=[0, 1], feature=(0, 1, 2))
    with pytest.raises(ValueError):
        linear_layer([3], 0, n_qubits=2)
    layer = EncodingLayer(eigenvalues=[1, -1], feature=2)
    with pytest.raises(ValueError):
        layer.feature_value([0.1, 0.2])
    with pytest.raises(ValueError):
        layer.gate_angles(0.5)


def test_product_feature():
    layer = EncodingLayer(eigenvalues=[0.5, -0.5], feature=(0, 1))
    assert layer.is_product
    assert layer.feature_value([2.0, 3.0, 5.0]) == pytest.approx(6.0)
    assert EncodingLayer.from_dict(layer.to_dict()).feature == (0, 1)


def test_parallel_state_default_gamma():
    layer = exponential_layer(2, 0)
    rho = parallel_state(layer, 0.0)
    assert np.allclose(rho.matrix, DensityMatrix.plus(2).matrix)
    rho = parallel_state(layer, 1.2, gamma=[1, 0, 0, 0])
    assert np.allclose(rho.matrix, DensityMatrix.zero(2).matrix)
    with pytest.raises(ValueError):
        parallel_state(layer, 0.0, gamma=[1, 1, 0, 0])


def test_sequential_state_brute_force():
    """Compare the circuit runner with explicit matrix products."""
    rng = np.random.default_rng(4)
    layers = [exponential_layer(2, 0), linear_layer([1], 1, 2, axis='X'),
              EncodingLayer(eigenvalues=rng.normal(size=4), feature=0)]
    spec = EncodingSpec(2, layers, slots=[0, 3], initial_state='zero')
    w = []
    for _ in spec.slots:
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        w.append(q)
    x = np.array([0.4, -1.1])
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1
    psi = w[0] @ psi
    for layer in layers:
        psi = layer.unitary(layer.feature_value(x)) @ psi
    psi = w[1] @ psi
    rho = sequential_state(spec, x, w)
    assert np.allclose(rho.matrix, np.outer(psi, psi.conj()), atol=1e-12)


def test_encoding_spec_validation():
    layer = exponential_layer(2, 0)
    with pytest.raises(ValueError):
        EncodingSpec(2, [])
    with pytest.raises(ValueError):
        EncodingSpec(3, [layer])
    with pytest.raises(ValueError):
        EncodingSpec(2, [layer], slots=[2])
    with pytest.raises(ValueError):
        EncodingSpec(2, [layer], initial_state='minus')
    spec = EncodingSpec(2, [layer])
    assert spec.slots == (0, 1)
    with pytest.raises(ValueError):
        sequential_state(spec, [0.1], [np.eye(4)])
    with pytest.raises(ValueError):
        sequential_state(spec, [0.1], [np.eye(4), np.ones((4, 4))])


def test_encoding_spec_dict_round_trip():
    spec = EncodingSpec(2, [exponential_layer(2, 0), linear_layer([0], 1, 2, axis='Y')],
                        slots=[1], initial_state='plus')
    again = EncodingSpec.from_dict(spec.to_dict())
    x = [0.3, 0.9]
    assert again.slots == spec.slots
    assert np.allclose(sequential_state(again, x).matrix, sequential_state(spec, x).matrix)
    assert spec.features == [0, 1]
    assert spec.n_features == 2
