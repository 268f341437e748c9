"""
Projected gradient ascent on the BCE loss inside L2 balls: empirical upper
bounds on robust accuracy to set against the certificates.
"""
import logging

import dask
import numpy as np
import pandas as pd
import xarray as xr

from ..data import annular_label
from ..model import ClassifierSpec, bce_loss, input_gradient

__all__ = ['AttackConfig', 'AttackResult', 'pgd_attack', 'semantic_check_annular',
           'attack_dataset', 'curve_from_attacks', 'attack_curve', 'ATTACK_COLUMNS']

log = logging.getLogger(__name__)

NORM_TOL = 1e-9
ATTACK_COLUMNS = ['point_id', 'epsilon', 'success', 'achieved_norm', 'semantic_valid',
                  'clean_correct']


class AttackConfig(object):
    """PGD settings; ``step_size`` defaults to 2.5 epsilon / steps."""

    def __init__(self, epsilon, steps=100, step_size=None, restarts=1, seed=0, h=1e-4):
        if epsilon < 0:
            raise ValueError(f"Attack radius must be non-negative, got {epsilon}")
        if steps < 1:
            raise ValueError(f"PGD needs at least one step, got {steps}")
        if restarts < 1:
            raise ValueError(f"PGD needs at least one start, got {restarts}")
        self.epsilon = float(epsilon)
        self.steps = int(steps)
        self._step_size = step_size
        self.restarts = int(restarts)
        self.seed = seed
        self.h = float(h)

    @property
    def step_size(self):
        if self._step_size is None:
            return 2.5 * self.epsilon / self.steps
        return float(self._step_size)

    def with_epsilon(self, epsilon):
        return AttackConfig(epsilon, self.steps, self._step_size, self.restarts, self.seed,
                            self.h)

    def __repr__(self):
        return '<AttackConfig eps=%g steps=%d step=%g restarts=%d>' % (
            self.epsilon, self.steps, self.step_size, self.restarts)


class AttackResult(object):

    def __init__(self, success, x_adv, norm, losses, semantic_valid=None):
        self.success = bool(success)
        self.x_adv = x_adv
        self.norm = float(norm)
        self.losses = losses
        self.semantic_valid = semantic_valid

    def __repr__(self):
        return '<AttackResult success=%s norm=%.4g>' % (self.success, self.norm)


def semantic_check_annular(point):
    """Ground-truth class of a 2-D point under the annulus rule."""
    return annular_label(point)


def _gradient(model, x, h):
    if isinstance(model, ClassifierSpec):
        return input_gradient(model, x, h=h)
    g = np.zeros(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        g[i] = (model.forward(x + e) - model.forward(x - e)) / (2 * h)
    return g


def _project(x, x0, eps):
    d = x - x0
    n = np.linalg.norm(d)
    if n > eps:
        d = d * (eps / n)
    return x0 + d


def _random_in_ball(rng, x0, eps):
    d = rng.normal(size=x0.size)
    d /= np.linalg.norm(d)
    return x0 + eps * rng.uniform() ** (1 / x0.size) * d


def pgd_attack(model, x, label, cfg, semantic=None, point_id=0):
    """Maximise the BCE loss of ``model`` at ``x`` over the ball of radius ``cfg.epsilon``.

    Parameters
    ----------
    model
        ClassifierSpec, or any object with ``forward(x)`` and ``predict(x)``
    x : array_like
        clean input
    label : int
        true class
    cfg : AttackConfig
    semantic : callable, optional
        ground-truth oracle; a flip only counts when ``semantic`` gives the same
        class at the adversarial point as at ``x``
    point_id : int
        the random stream of restarts is seeded by ``(cfg.seed, point_id)``

    Returns
    -------
    AttackResult
        ``success`` means the clean prediction was correct and some point of
        the ball is classified differently.
    """
    x0 = np.atleast_1d(np.asarray(x, dtype=float))
    truth = None if semantic is None else semantic(x0)
    losses = []
    if cfg.epsilon == 0 or model.predict(x0) != label:
        return AttackResult(False, x0.copy(), 0.0, losses)
    rng = np.random.default_rng([cfg.seed, point_id])
    eps, step = cfg.epsilon, cfg.step_size
    best = x0.copy()
    semantic_valid = None
    for start in range(cfg.restarts):
        xk = x0.copy() if start == 0 else _random_in_ball(rng, x0, eps)
        for _ in range(cfg.steps):
            p = model.forward(xk)
            losses.append(float(bce_loss(p, label)))
            g = _gradient(model, xk, cfg.h)
            # d BCE / d y has the sign of (1 - 2 label)
            g = g * (1 - 2 * label)
            n = np.linalg.norm(g)
            if n == 0:
                g = rng.normal(size=xk.size)
                n = np.linalg.norm(g)
            xk = _project(xk + step * g / n, x0, eps)
            if model.predict(xk) != label:
                ok = truth is None or semantic(xk) == truth
                semantic_valid = ok if truth is not None else None
                if ok:
                    return AttackResult(True, xk, np.linalg.norm(xk - x0), losses,
                                        semantic_valid)
        best = xk
    return AttackResult(False, best, np.linalg.norm(best - x0), losses, semantic_valid)


def _attack_point(model, x, label, epsilons, cfg, semantic, point_id):
    rows = []
    hit = None
    clean_correct = bool(model.predict(np.atleast_1d(x)) == label)
    for eps in epsilons:
        if hit is not None:
            res = hit
        else:
            res = pgd_attack(model, x, label, cfg.with_epsilon(eps), semantic, point_id)
            if res.success:
                hit = res
        rows.append({'point_id': point_id, 'epsilon': eps, 'success': res.success,
                     'achieved_norm': res.norm, 'semantic_valid': res.semantic_valid,
                     'clean_correct': clean_correct})
    return rows


def attack_dataset(model, dataset, epsilons, cfg, semantic=None, threads=1):
    """Attack every point at every radius; one table row per (point, epsilon).

    Radii are processed in increasing order and a success at a smaller radius
    is carried to all larger ones.
    """
    points = np.asarray(dataset.points, dtype=float)
    labels = np.asarray(dataset.labels)
    if len(points) == 0:
        raise ValueError("Cannot attack an empty dataset")
    epsilons = np.sort(np.atleast_1d(np.asarray(epsilons, dtype=float)))
    if epsilons.size == 0:
        raise ValueError("Attack radius grid is empty")

    def run(idx):
        return [r for i in idx for r in _attack_point(model, points[i], int(labels[i]), epsilons,
                                                      cfg, semantic, int(i))]

    if threads <= 1:
        rows = run(range(len(points)))
    else:
        chunks = np.array_split(np.arange(len(points)), threads)
        parts = dask.compute(*[dask.delayed(run)(c) for c in chunks], scheduler='threads',
                             num_workers=threads)
        rows = [r for p in parts for r in p]
    frame = pd.DataFrame(rows, columns=ATTACK_COLUMNS)
    for eps, grp in frame.groupby('epsilon'):
        log.info('eps=%g: %d of %d attacks succeeded', eps, int(grp.success.sum()), len(grp))
    return frame


def curve_from_attacks(frame):
    """Accuracy under attack per radius: clean-correct points the attack did not flip."""
    held = frame.clean_correct & ~frame.success.astype(bool)
    acc = held.groupby(frame.epsilon).mean()
    ds = xr.Dataset({'accuracy': (['epsilon'], acc.values.astype(float))},
                    coords={'epsilon': (['epsilon'], acc.index.values)},
                    attrs={'n_points': int(frame.point_id.nunique())})
    ds.epsilon.attrs['long_name'] = 'L2 attack radius in input space'
    return ds


def attack_curve(model, dataset, epsilons, cfg, semantic=None, threads=1):
    """Accuracy under PGD attack over the radius grid, as an xarray Dataset."""
    return curve_from_attacks(attack_dataset(model, dataset, epsilons, cfg, semantic, threads))
