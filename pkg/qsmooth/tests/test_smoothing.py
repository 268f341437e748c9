import numpy as np
import pytest

from qsmooth.encoding import (EncodingLayer, EncodingSpec, exponential_layer, linear_layer,
                              parallel_state, sequential_state)
from qsmooth.numerics import DensityMatrix
from qsmooth.smoothing import (CustomDistribution, Distribution, GaussianDistribution,
                               PSDViolationError, QuantumChannel, Smoothing, SmoothingMatrix,
                               apply_channel, build_A, conjugated_channel, cross_term,
                               identity_channel, kraus_from_A, mc_smoothed_state,
                               nonlinear_pd_param, nonlinear_smoothing_matrix, pd_param,
                               phase_damping, smooth_sequential_state)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _random_pairs(n, seed=0):
    """(distribution, eigenvalue vector) pairs up to dimension 32."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        dim = 2 ** rng.integers(1, 6)
        if rng.random() < 0.5:
            dist = Distribution('gaussian', sigma=rng.uniform(0.05, 2))
        else:
            dist = Distribution('uniform', width=rng.uniform(0.1, 4))
        yield dist, rng.normal(0, 2, dim)


def _random_state(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def test_distributions():
    g = Distribution('gaussian', sigma=0.5)
    assert g.characteristic(0) == 1
    assert g.characteristic(2.0) == pytest.approx(np.exp(-0.5))
    u = Distribution('uniform', width=2.0)
    assert u.characteristic(0.0) == pytest.approx(1.0)
    assert u.characteristic(1.0) == pytest.approx(np.sin(1.0))
    assert u.sigma == pytest.approx(2 / np.sqrt(12))
    assert Distribution('uniform', sigma=0.5).width == pytest.approx(np.sqrt(12) * 0.5)
    assert u.support() == (-1.0, 1.0)
    with pytest.raises(ValueError):
        Distribution('laplace', sigma=1)
    with pytest.raises(ValueError):
        Distribution('gaussian', sigma=-1)
    with pytest.raises(ValueError):
        CustomDistribution(lambda t: 0.5 + 0 * t)


def test_gaussian_A_is_rbf_kernel():
    lam = np.array([0.5, -0.5, 1.5, -1.5])
    sigma = 0.7
    a = build_A(Distribution('gaussian', sigma=sigma), lam).matrix
    expected = np.exp(-(lam[:, None] - lam[None, :]) ** 2 * sigma ** 2 / 2)
    assert np.allclose(a, expected, atol=1e-15)


def test_kraus_completeness_and_action():
    """The Kraus set is trace preserving and acts as rho * A."""
    rng = np.random.default_rng(1)
    for dist, lam in _random_pairs(100):
        a = build_A(dist, lam)
        ch = kraus_from_A(a)
        assert ch.completeness_error() <= 1e-10
        rho = _random_state(rng, lam.size)
        out = np.einsum('kij,jl,kml->im', ch.kraus, rho.matrix, ch.kraus.conj())
        assert np.max(np.abs(out - rho.matrix * a.matrix)) <= 1e-10


def test_smoothing_matrix_psd():
    for dist, lam in _random_pairs(200, seed=2):
        assert build_A(dist, lam).min_eigenvalue() >= -1e-10


def test_complete_positivity_witness():
    """(I x E)(|psi><psi|) stays positive for entangled inputs."""
    rng = np.random.default_rng(3)
    ch = kraus_from_A(build_A(Distribution('uniform', width=3.0), rng.normal(size=4)))
    for _ in range(20):
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi /= np.linalg.norm(psi)
        ext = QuantumChannel([np.kron(np.eye(4), k) for k in ch.kraus])
        out = ext.apply_matrix(np.outer(psi, psi.conj()))
        assert np.min(np.linalg.eigvalsh(out)) >= -1e-9


def test_kraus_from_A_rejects_non_psd():
    a = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(PSDViolationError) as err:
        kraus_from_A(a)
    assert err.value.min_eigenvalue == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        SmoothingMatrix([[2.0, 0], [0, 1.0]])


def test_zero_sigma_is_identity():
    lam = np.array([3.0, -1.0, 0.5, 2.0])
    ch = kraus_from_A(build_A(Distribution('gaussian', sigma=0.0), lam))
    assert ch.n_kraus == 1
    rho = _random_state(np.random.default_rng(0), 4)
    assert np.allclose(apply_channel(ch, rho).matrix, rho.matrix, atol=1e-12)


def test_channel_matches_sampled_encoding():
    """Smoothing channel on rho(x) equals the noise average of rho(x + delta)."""
    rng = np.random.default_rng(5)
    for n_qubits in (1, 2):
        layer = EncodingLayer(eigenvalues=rng.normal(0, 1, 2 ** n_qubits), feature=0)
        spec = EncodingSpec(n_qubits, [layer], slots=[], initial_state='plus')
        smoothing = Smoothing(Distribution('gaussian', sigma=0.6), 'layer')
        exact = apply_channel(kraus_from_A(build_A(smoothing.distribution, layer.eigenvalues)),
                              parallel_state(layer, 0.4)).matrix
        mc, se = mc_smoothed_state(spec, [0.4], None, smoothing, samples=200000, seed=9,
                                   return_stderr=True)
        assert np.all(np.abs(mc.matrix - exact) <= np.maximum(1e-2, 3 * se))


def test_phase_damping_matches_rz_smoothing():
    """Phase damping 1 - phi(s)^2 after RZ(s x) x I equals the closed-form average."""
    rng = np.random.default_rng(6)
    for _ in range(50):
        sigma = rng.uniform(0.05, 2)
        scale = rng.choice([1.0, 2.0, 4.0])
        rho = _random_state(rng, 4)
        dist = Distribution('gaussian', sigma=sigma)
        ch = phase_damping(pd_param(dist, scale)).embed(0, 2)
        out = apply_channel(ch, rho).matrix
        # off-diagonal blocks of qubit 0 are attenuated by exp(-sigma^2 s^2 / 2)
        expected = np.array(rho.matrix)
        expected[:2, 2:] *= np.exp(-0.5 * sigma ** 2 * scale ** 2)
        expected[2:, :2] *= np.exp(-0.5 * sigma ** 2 * scale ** 2)
        assert np.max(np.abs(out - expected)) <= 1e-12


def test_pd_param_values():
    g = Distribution('gaussian', sigma=1.0)
    assert pd_param(g, 1.0) == pytest.approx(0.632121, abs=1e-6)
    assert pd_param(g, 0.0) == 0.0
    for k in range(3):
        assert pd_param(Distribution('gaussian', sigma=0.3), 2 ** k) == \
            pytest.approx(1 - np.exp(-2 ** (2 * k) * 0.09))
    with pytest.raises(ValueError):
        phase_damping(1.5)


def test_conjugated_channel_turns_rz_into_rx_smoothing():
    dist = Distribution('gaussian', sigma=0.8)
    ch = conjugated_channel(phase_damping(pd_param(dist, 1.0)), HADAMARD)
    layer = linear_layer([0], 0, 1, axis='X')
    spec = EncodingSpec(1, [layer], slots=[], initial_state='zero')
    x = 0.3
    exact = apply_channel(ch, sequential_state(spec, [x])).matrix
    mc, se = mc_smoothed_state(spec, [x], None, Smoothing(dist, 'layer'), samples=100000, seed=1,
                               return_stderr=True)
    assert np.all(np.abs(mc.matrix - exact) <= np.maximum(5e-3, 4 * se))
    back = conjugated_channel(ch, HADAMARD.conj().T)
    assert np.allclose(back.kraus, phase_damping(pd_param(dist, 1.0)).kraus, atol=1e-12)
    with pytest.raises(ValueError):
        conjugated_channel(ch, np.ones((2, 2)))


def test_channel_compose_and_embed():
    pd = phase_damping(0.3)
    two = pd.compose(phase_damping(0.5))
    rho = DensityMatrix.plus(1)
    off = apply_channel(two, rho).matrix[0, 1]
    assert off == pytest.approx(0.5 * np.sqrt(0.7) * np.sqrt(0.5))
    with pytest.raises(ValueError):
        pd.embed(2, 2)
    with pytest.raises(ValueError):
        identity_channel(4).embed(0, 2)
    with pytest.raises(ValueError):
        QuantumChannel([np.eye(2) * 2])


def test_nonlinear_pd_param():
    g = Distribution('gaussian', sigma=1.0)
    assert nonlinear_pd_param(g, 0.0, 0.0)[0] == pytest.approx(0.5)
    assert nonlinear_pd_param(Distribution('gaussian', sigma=0.0), 0.7, -0.2)[0] == 0.0


def test_nonlinear_pd_param_monte_carlo():
    """The sampled cross term reproduces the Gaussian closed form."""
    sigma = 0.6
    g = GaussianDistribution(sigma)
    sampled = CustomDistribution(g.characteristic, sampler=g.sample, sigma=sigma)
    for x1, x2 in [(0.3, -0.4), (1.0, 0.5)]:
        closed, _ = nonlinear_pd_param(g, x1, x2)
        value, se = nonlinear_pd_param(sampled, x1, x2, samples=10 ** 6, seed=4)
        assert abs(value - closed) <= 4 * se + 1e-12
    m, se = cross_term(g, samples=10 ** 6, seed=2)
    assert abs(m - 1 / np.sqrt(1 + sigma ** 4)) <= 4 * se


def test_nonlinear_smoothing_matrix_sampling():
    rng = np.random.default_rng(7)
    lam = np.array([0.5, -0.5, 1.5, -1.5])
    x1, x2 = 0.8, -0.6
    delta = rng.normal(0, 0.5, (2, 400000))
    shift = (x1 + delta[0]) * (x2 + delta[1]) - x1 * x2
    diff = lam[:, None] - lam[None, :]
    mc = np.mean(np.exp(-1j * np.multiply.outer(shift, diff)), axis=0)
    for dist in (Distribution('gaussian', sigma=0.5),):
        a = nonlinear_smoothing_matrix(dist, lam, x1, x2).matrix
        assert np.max(np.abs(a - mc)) < 1e-2
        assert np.min(np.linalg.eigvalsh(a)) >= -1e-10


def test_nonlinear_smoothing_matrix_quadrature():
    """Non-Gaussian laws are integrated; the result is Hermitian PSD with unit diagonal."""
    lam = np.array([0.5, -0.5])
    a = nonlinear_smoothing_matrix(Distribution('uniform', width=1.5), lam, 0.4, 1.1)
    assert np.allclose(np.diag(a.matrix), 1)
    assert a.min_eigenvalue() >= -1e-10
    rng = np.random.default_rng(8)
    d = rng.uniform(-0.75, 0.75, (2, 400000))
    shift = (0.4 + d[0]) * (1.1 + d[1]) - 0.44
    assert abs(a.matrix[0, 1] - np.mean(np.exp(-1j * shift))) < 1e-2


@pytest.mark.parametrize('strategy', ['exponential', 'uniform', 'layer'])
def test_smooth_sequential_state_matches_sampling(strategy):
    layers = [exponential_layer(2, 0), linear_layer([0, 1], 1, 2, axis='Y'),
              exponential_layer(2, 0)]
    spec = EncodingSpec(2, layers, slots=[1], initial_state='plus')
    rng = np.random.default_rng(10)
    w, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    smoothing = Smoothing(Distribution('gaussian', sigma=0.3), strategy)
    x = [0.6, -0.2]
    exact = smooth_sequential_state(spec, x, [w], smoothing).matrix
    mc, se = mc_smoothed_state(spec, x, [w], smoothing, samples=200000, seed=3,
                               return_stderr=True)
    assert np.all(np.abs(mc.matrix - exact) <= np.maximum(1e-2, 3 * se))


def test_smooth_sequential_state_single_layer_and_zero_noise():
    layer = EncodingLayer(eigenvalues=[1.0, -0.2, 0.4, -1.2], feature=0)
    spec = EncodingSpec(2, [layer], slots=[], initial_state='plus')
    dist = Distribution('uniform', width=1.7)
    out = smooth_sequential_state(spec, [0.9], None, Smoothing(dist, 'layer')).matrix
    expected = parallel_state(layer, 0.9).matrix * build_A(dist, layer.eigenvalues).matrix
    assert np.allclose(out, expected, atol=1e-12)
    zero = Smoothing(Distribution('gaussian', sigma=0.0))
    assert np.allclose(smooth_sequential_state(spec, [0.9], None, zero).matrix,
                       sequential_state(spec, [0.9]).matrix, atol=1e-12)


def test_mc_smoothed_state_is_reproducible():
    spec = EncodingSpec(2, [exponential_layer(2, 0)] * 2, initial_state='plus', slots=[])
    smoothing = Smoothing(Distribution('gaussian', sigma=0.4))
    a = mc_smoothed_state(spec, [0.2], None, smoothing, samples=5000, seed=11)
    b = mc_smoothed_state(spec, [0.2], None, smoothing, samples=5000, seed=11, threads=3)
    assert np.allclose(a.matrix, b.matrix, atol=1e-13)
    zero = Smoothing(Distribution('gaussian', sigma=0.0))
    c = mc_smoothed_state(spec, [0.2], None, zero, samples=3)
    assert np.allclose(c.matrix, sequential_state(spec, [0.2]).matrix, atol=1e-12)
    with pytest.raises(ValueError):
        mc_smoothed_state(spec, [0.2], None, smoothing, samples=0)


def test_noise_weights():
    spec = EncodingSpec(3, [exponential_layer(3, 0), linear_layer([0, 2], 1, 3),
                            exponential_layer(3, 0)])
    dist = Distribution('gaussian', sigma=1.0)
    assert Smoothing(dist, 'layer').noise_weights(spec) == {0: 2.0, 1: 1.0}
    assert Smoothing(dist, 'exponential').noise_weights(spec) == {0: 6.0, 1: 2.0}
    assert Smoothing(dist, 'uniform').noise_weights(spec) == {0: 42.0, 1: 2.0}
    assert Smoothing(dist).layer_counts(spec) == {0: (2, 3), 1: (1, 2)}


def test_smoothing_dict_round_trip():
    s = Smoothing(Distribution('uniform', width=0.9), 'uniform')
    again = Smoothing.from_dict(s.to_dict())
    assert again.strategy == 'uniform'
    assert again.distribution.width == pytest.approx(0.9)
    with pytest.raises(ValueError):
        Smoothing(s.distribution, 'per_qubit')
    with pytest.raises(ValueError):
        Smoothing(0.5)
