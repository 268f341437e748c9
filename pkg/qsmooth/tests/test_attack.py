import numpy as np
import pytest

from qsmooth.attack import (AttackConfig, attack_curve, attack_dataset, curve_from_attacks,
                            pgd_attack, semantic_check_annular)
from qsmooth.attack.pgd import NORM_TOL
from qsmooth.certify import certify_point
from qsmooth.data import Dataset
from qsmooth.encoding import EncodingSpec, exponential_layer
from qsmooth.model import Ansatz, ClassifierSpec
from qsmooth.smoothing import Distribution, Smoothing


class HalfPlane(object):
    """Class 1 right of x0 = 0, with a smooth output in (0.1, 0.9)."""

    def forward(self, x):
        return 0.5 + 0.4 * np.tanh(x[0])

    def predict(self, x):
        return int(self.forward(x) > 0.5)


class Disc(object):
    """Class 1 outside the circle of radius 0.8."""

    def forward(self, x):
        return 0.5 + 0.4 * np.tanh(np.linalg.norm(x) - 0.8)

    def predict(self, x):
        return int(self.forward(x) > 0.5)


def test_attack_config():
    cfg = AttackConfig(0.4, steps=50)
    assert cfg.step_size == pytest.approx(2.5 * 0.4 / 50)
    assert AttackConfig(0.4, step_size=0.01).step_size == 0.01
    assert cfg.with_epsilon(0.1).steps == 50
    with pytest.raises(ValueError):
        AttackConfig(-0.1)
    with pytest.raises(ValueError):
        AttackConfig(0.1, steps=0)
    with pytest.raises(ValueError):
        AttackConfig(0.1, restarts=0)


def test_pgd_half_plane():
    model = HalfPlane()
    x = np.array([0.3, 0.2])
    # the boundary is 0.3 away
    far = pgd_attack(model, x, 1, AttackConfig(0.5))
    assert far.success
    assert model.predict(far.x_adv) == 0
    assert far.norm <= 0.5 + NORM_TOL
    near = pgd_attack(model, x, 1, AttackConfig(0.2))
    assert not near.success
    assert near.norm <= 0.2 + NORM_TOL
    assert model.predict(near.x_adv) == 1
    assert len(near.losses) == 100


def test_pgd_no_attack():
    model = HalfPlane()
    res = pgd_attack(model, [0.3, 0.0], 1, AttackConfig(0.0))
    assert not res.success and res.norm == 0
    # misclassified points are never counted as successes
    res = pgd_attack(model, [0.3, 0.0], 0, AttackConfig(1.0))
    assert not res.success


def test_pgd_semantic_check():
    model = Disc()
    x = np.array([0.5, 0.0])
    assert semantic_check_annular(x) == 0
    plain = pgd_attack(model, x, 0, AttackConfig(0.5))
    assert plain.success
    assert plain.semantic_valid is None
    # crossing r = 0.8 also changes the true class
    checked = pgd_attack(model, x, 0, AttackConfig(0.5), semantic=semantic_check_annular)
    assert not checked.success
    assert checked.semantic_valid is False


def test_pgd_restarts_seeded():
    model = HalfPlane()
    cfg = AttackConfig(0.2, steps=10, restarts=3, seed=4)
    a = pgd_attack(model, [0.3, 0.1], 1, cfg, point_id=2)
    b = pgd_attack(model, [0.3, 0.1], 1, cfg, point_id=2)
    assert np.array_equal(a.x_adv, b.x_adv)
    assert len(a.losses) == 30


def _half_plane_data():
    points = [[0.1, 0.0], [0.25, 0.3], [-0.4, 0.1], [0.6, -0.2], [-0.2, 0.0]]
    labels = [1, 1, 0, 1, 1]
    return Dataset(points, labels)


def test_attack_dataset():
    ds = _half_plane_data()
    epsilons = [0.5, 0.0, 0.15, 0.3]
    frame = attack_dataset(HalfPlane(), ds, epsilons, AttackConfig(0.0, steps=40))
    assert len(frame) == len(ds) * 4
    assert list(np.unique(frame.epsilon)) == [0.0, 0.15, 0.3, 0.5]
    # the last point is misclassified
    assert not frame[frame.point_id == 4].clean_correct.any()
    assert not frame[frame.point_id == 4].success.any()
    # a flip at a smaller radius carries over to the larger ones
    for _, grp in frame.groupby('point_id'):
        s = grp.sort_values('epsilon').success.values.astype(int)
        assert np.all(np.diff(s) >= 0)
    flipped = frame[frame.epsilon == 0.15].set_index('point_id').success
    assert flipped[0] and not flipped[1] and not flipped[3]
    assert np.all(frame.achieved_norm <= frame.epsilon + NORM_TOL)


def test_attack_dataset_threads():
    ds = _half_plane_data()
    cfg = AttackConfig(0.0, steps=20, restarts=2, seed=1)
    single = attack_dataset(HalfPlane(), ds, [0.1, 0.3], cfg)
    threaded = attack_dataset(HalfPlane(), ds, [0.1, 0.3], cfg, threads=3)
    assert single.equals(threaded)


def test_attack_dataset_errors():
    with pytest.raises(ValueError):
        attack_dataset(HalfPlane(), Dataset(np.zeros((0, 2)), []), [0.1], AttackConfig(0.0))
    with pytest.raises(ValueError):
        attack_dataset(HalfPlane(), _half_plane_data(), [], AttackConfig(0.0))


def test_curve_from_attacks():
    ds = _half_plane_data()
    frame = attack_dataset(HalfPlane(), ds, [0.0, 0.15, 0.3, 0.5], AttackConfig(0.0, steps=40))
    curve = curve_from_attacks(frame)
    acc = curve.accuracy.values
    assert curve.attrs['n_points'] == 5
    # clean accuracy at radius zero
    assert acc[0] == pytest.approx(4 / 5)
    assert np.all(np.diff(acc) <= 0)
    assert acc[-1] == pytest.approx(1 / 5)


def test_attack_smoothed_classifier():
    encoding = EncodingSpec(2, [exponential_layer(2, 0), exponential_layer(2, 1)],
                            initial_state='plus')
    ansatz = Ansatz(2, [['two_local']] * 3)
    spec = ClassifierSpec(encoding, ansatz, smoothing=Smoothing(Distribution('gaussian',
                                                                             sigma=0.3)),
                          seed=3)
    rng = np.random.default_rng(0)
    points = rng.uniform(-1, 1, (4, 2))
    labels = [spec.predict(p) for p in points]
    ds = Dataset(points, labels)
    cfg = AttackConfig(0.0, steps=5)
    curve = attack_curve(spec, ds, [0.0, 0.4], cfg)
    assert curve.accuracy.values[0] == 1.0
    frame = attack_dataset(spec, ds, [0.4], cfg)
    for row in frame.itertuples():
        assert row.achieved_norm <= 0.4 + NORM_TOL


@pytest.mark.parametrize('strategy', ['exponential', 'uniform', 'layer'])
@pytest.mark.parametrize('seed', [0, 1, 2])
def test_certified_radius_survives_attack(strategy, seed):
    encoding = EncodingSpec(2, [exponential_layer(2, 0), exponential_layer(2, 1)],
                            initial_state='plus')
    spec = ClassifierSpec(encoding, Ansatz(2, [['two_local']] * 3),
                          smoothing=Smoothing(Distribution('gaussian', sigma=0.5), strategy),
                          seed=seed)
    points = np.random.default_rng(seed).uniform(-1.5, 1.5, (6, 2))
    attacked = 0
    for i, x in enumerate(points):
        cert = certify_point(spec, x, mode='exact', point_id=i)
        if cert.radius <= 0:
            continue
        cfg = AttackConfig(0.95 * cert.radius, steps=40, restarts=3, seed=seed)
        res = pgd_attack(spec, x, cert.prediction, cfg, point_id=i)
        assert not res.success, (i, cert)
        assert spec.predict(res.x_adv) == cert.prediction
        attacked += 1
    assert attacked > 0
