"""
Labelled binary datasets: TwoMoons, the Annular ground truth, and splits.
"""
import numpy as np
import pandas as pd

__all__ = ['SPLITS', 'Dataset', 'two_moons', 'annular', 'annular_label', 'split']

SPLITS = ('all', 'train', 'test')
ANNULUS = (0.3, 0.8)


class Dataset(object):
    """Points with binary labels; arrays are read-only after construction."""

    def __init__(self, points, labels, split='all', seed=None):
        points = np.array(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        labels = np.array(labels).astype(int).ravel()
        if points.shape[0] != labels.size:
            raise ValueError(f"{points.shape[0]} points but {labels.size} labels")
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("Labels must be 0 or 1")
        if split not in SPLITS:
            raise ValueError(f"Unknown split tag '{split}', expected one of {SPLITS}")
        points.flags.writeable = False
        labels.flags.writeable = False
        self._points = points
        self._labels = labels
        self.split = split
        self.seed = seed

    @property
    def points(self):
        return self._points

    @property
    def labels(self):
        return self._labels

    @property
    def n_features(self):
        return self._points.shape[1]

    def __len__(self):
        return self._labels.size

    def subset(self, indices, split=None):
        indices = np.asarray(indices, dtype=int)
        return Dataset(self._points[indices], self._labels[indices],
                       self.split if split is None else split, self.seed)

    def to_dataframe(self):
        df = pd.DataFrame(self._points, columns=['x%d' % i for i in range(self.n_features)])
        df['label'] = self._labels
        return df

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False)
        return path

    def __repr__(self):
        return '<Dataset %s n=%d features=%d>' % (self.split, len(self), self.n_features)


def two_moons(n, noise=0.1, seed=0, shuffle=True):
    """Two interleaving half circles.

    Class 0 lies on (cos t, sin t) and class 1 on (1 - cos t, 0.5 - sin t) for
    t drawn uniformly from [0, pi]; isotropic Gaussian noise of std ``noise``
    is added. Class 0 gets n // 2 points, class 1 the rest.
    """
    if n < 2:
        raise ValueError(f"TwoMoons needs at least 2 points, got {n}")
    if noise < 0:
        raise ValueError(f"Noise level must be non-negative, got {noise}")
    n_out = n // 2
    n_in = n - n_out
    rng = np.random.default_rng(seed)
    t_out = rng.uniform(0, np.pi, n_out)
    t_in = rng.uniform(0, np.pi, n_in)
    points = np.vstack([np.column_stack([np.cos(t_out), np.sin(t_out)]),
                        np.column_stack([1 - np.cos(t_in), 0.5 - np.sin(t_in)])])
    labels = np.concatenate([np.zeros(n_out, dtype=int), np.ones(n_in, dtype=int)])
    if shuffle:
        order = rng.permutation(n)
        points, labels = points[order], labels[order]
    if noise > 0:
        points = points + rng.normal(0, noise, points.shape)
    return Dataset(points, labels, seed=seed)


def annular_label(point):
    """1 - 1[0.3 < |x| <= 0.8]."""
    r = np.linalg.norm(np.asarray(point, dtype=float), axis=-1)
    inside = (r > ANNULUS[0]) & (r <= ANNULUS[1])
    return (1 - inside).astype(int) if np.ndim(inside) else int(1 - inside)


def annular(n, box=(-1.0, 1.0), seed=0):
    """``n`` uniform points in the square ``box`` x ``box`` labelled by the annulus rule."""
    if n < 1:
        raise ValueError(f"Annular needs at least 1 point, got {n}")
    lo, hi = box
    if not lo < hi:
        raise ValueError(f"Sampling box must satisfy lower < upper, got {box}")
    rng = np.random.default_rng(seed)
    points = rng.uniform(lo, hi, (n, 2))
    return Dataset(points, annular_label(points), seed=seed)


def split(ds, fraction=0.8, seed=0):
    """Seeded shuffle of ``ds`` into disjoint (train, test) parts."""
    if not 0 < fraction < 1:
        raise ValueError(f"Train fraction must lie in (0, 1), got {fraction}")
    n_train = int(round(fraction * len(ds)))
    if n_train == 0 or n_train == len(ds):
        raise ValueError(f"Fraction {fraction} of {len(ds)} points leaves an empty split")
    order = np.random.default_rng(seed).permutation(len(ds))
    return ds.subset(order[:n_train], 'train'), ds.subset(order[n_train:], 'test')
