"""
Run configuration: a JSON file validated block by block.
"""
import hashlib
import json
import os
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import (BaseModel, ConfigDict, Field, ValidationError, field_validator,
                      model_validator)

__all__ = ['ConfigError', 'RunConfig', 'load_config', 'config_hash', 'DATASET_FEATURES']

# input features produced by each synthetic dataset
DATASET_FEATURES = {'two_moons': 2, 'annular': 2}


class ConfigError(ValueError):
    """Schema violation; ``paths`` lists the dotted field paths at fault."""

    def __init__(self, message, paths=()):
        self.message = message
        self.paths = list(paths)

    def __str__(self):
        if not self.paths:
            return self.message
        return '%s: %s' % (self.message, ', '.join(self.paths))


class _Block(BaseModel):
    model_config = ConfigDict(extra='forbid')


class ExperimentConfig(_Block):
    name: str = 'experiment'
    seed: int = 0


class DatasetConfig(_Block):
    kind: Literal['two_moons', 'annular', 'mnist']
    n: int = Field(250, ge=2)
    noise: float = Field(0.1, ge=0)
    train_fraction: float = Field(0.8, gt=0, lt=1)
    box: Tuple[float, float] = (-1.0, 1.0)
    images: Optional[str] = None
    labels: Optional[str] = None
    digits: Tuple[int, int] = (0, 1)
    per_class: int = Field(100, ge=1)
    seed: Optional[int] = None


class LayerConfig(_Block):
    type: Literal['exponential', 'linear', 'spectrum']
    feature: Union[int, Tuple[int, int]]
    n: Optional[int] = Field(None, ge=1)
    first_qubit: int = Field(0, ge=0)
    qubits: Optional[List[int]] = None
    eigenvalues: Optional[List[float]] = None
    axis: Literal['X', 'Y', 'Z'] = 'Z'
    scale: float = 1.0

    @model_validator(mode='after')
    def _check_kind(self):
        if self.type == 'exponential' and self.n is None:
            raise ValueError("exponential layers need 'n'")
        if self.type == 'linear' and not self.qubits:
            raise ValueError("linear layers need 'qubits'")
        if self.type == 'spectrum' and not self.eigenvalues:
            raise ValueError("spectrum layers need 'eigenvalues'")
        return self

    def used_qubits(self):
        if self.type == 'exponential':
            return list(range(self.first_qubit, self.first_qubit + self.n))
        if self.type == 'linear':
            return list(self.qubits)
        return []

    def used_features(self):
        return list(self.feature) if isinstance(self.feature, tuple) else [self.feature]


class FrontendConfig(_Block):
    in_dim: int = Field(..., ge=1)
    out_dim: int = Field(..., ge=1)
    scale: Optional[float] = Field(None, gt=0)


class ModelConfig(_Block):
    kind: Literal['variational', 'kernel'] = 'variational'
    qubits: int = Field(..., ge=1, le=12)
    layers: List[LayerConfig] = Field(..., min_length=1)
    slots: Optional[List[int]] = None
    initial_state: Literal['zero', 'plus'] = 'zero'
    blocks: List[List[Literal['two_local', 'real_amplitudes']]] = Field(default_factory=list)
    reps: int = Field(1, ge=1)
    povm: Literal['parity', 'last_qubit'] = 'parity'
    frontend: Optional[FrontendConfig] = None
    ridge: float = Field(1e-3, ge=0)


class SmoothingConfig(_Block):
    enabled: bool = True
    distribution: Literal['gaussian', 'uniform'] = 'gaussian'
    sigma: float = Field(0.5, ge=0)
    sigmas: List[float] = Field(default_factory=list)
    strategy: Literal['exponential', 'uniform', 'layer'] = 'exponential'

    @field_validator('sigmas')
    @classmethod
    def _positive(cls, v):
        if any(s <= 0 for s in v):
            raise ValueError('sweep values must be positive')
        return v

    def sweep(self):
        return list(self.sigmas) if self.sigmas else [self.sigma]


class TrainConfigBlock(_Block):
    learning_rate: float = Field(0.1, gt=0)
    epochs: int = Field(50, ge=0)
    batch_size: int = Field(16, ge=1)
    gradient: Literal['parameter_shift', 'finite_difference'] = 'parameter_shift'
    h: float = Field(1e-4, gt=0)
    smoothed: bool = False


class CertifyConfig(_Block):
    modes: List[Literal['exact', 'shots']] = Field(default_factory=lambda: ['exact'])
    shots: int = Field(10000, ge=1)
    alpha: float = Field(0.05, gt=0, lt=1)
    radii: Optional[List[float]] = None
    radius_max: float = Field(1.0, gt=0)
    radius_points: int = Field(21, ge=1)
    formula: Literal['conservative', 'compact'] = 'conservative'

    def radius_grid(self):
        if self.radii is not None:
            return np.asarray(self.radii, dtype=float)
        return np.linspace(0, self.radius_max, self.radius_points)


class AttackConfigBlock(_Block):
    epsilons: List[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2, 0.3, 0.5])
    steps: int = Field(100, ge=1)
    step_size: Optional[float] = Field(None, gt=0)
    restarts: int = Field(1, ge=1)
    h: float = Field(1e-4, gt=0)
    semantic: bool = False

    @field_validator('epsilons')
    @classmethod
    def _grid(cls, v):
        if not v:
            raise ValueError('attack radius grid is empty')
        if any(e < 0 for e in v):
            raise ValueError('attack radii must be non-negative')
        return v


class KernelConfig(_Block):
    dims: Literal[1, 2] = 1
    grid_min: float = -3.141592653589793
    grid_max: float = 3.141592653589793
    points: int = Field(101, ge=2)
    sigma: float = Field(1.5, ge=0)
    center: Optional[List[float]] = None


class OutputConfig(_Block):
    dir: str = 'results'
    format: Literal['nc', 'zarr'] = 'nc'


class RunConfig(_Block):
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    dataset: DatasetConfig
    model: ModelConfig
    smoothing: SmoothingConfig = Field(default_factory=SmoothingConfig)
    train: TrainConfigBlock = Field(default_factory=TrainConfigBlock)
    certify: CertifyConfig = Field(default_factory=CertifyConfig)
    attack: AttackConfigBlock = Field(default_factory=AttackConfigBlock)
    kernel: KernelConfig = Field(default_factory=KernelConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    def n_features(self):
        """Features the encoding sees: raw dataset features or the front-end output."""
        if self.model.frontend is not None:
            return self.model.frontend.out_dim
        return DATASET_FEATURES.get(self.dataset.kind)

    def cross_check(self):
        """Consistency between blocks; returns ``(message, path)`` pairs."""
        problems = []
        m = self.model
        n_feat = self.n_features()
        if self.dataset.kind == 'mnist':
            if m.frontend is None:
                problems.append(('mnist inputs need a front-end', 'model.frontend'))
            for key in ('images', 'labels'):
                if getattr(self.dataset, key) is None:
                    problems.append(('mnist needs an IDX file path', 'dataset.%s' % key))
        elif m.frontend is not None and m.frontend.in_dim != DATASET_FEATURES[self.dataset.kind]:
            problems.append(('front-end input size does not match the dataset',
                             'model.frontend.in_dim'))
        for k, layer in enumerate(m.layers):
            bad = [q for q in layer.used_qubits() if q >= m.qubits]
            if bad:
                problems.append(('layer uses qubits %s outside the register' % bad,
                                 'model.layers.%d' % k))
            if layer.type == 'spectrum' and len(layer.eigenvalues) != 2 ** m.qubits:
                problems.append(('spectrum length must be 2^qubits',
                                 'model.layers.%d.eigenvalues' % k))
            if n_feat is not None and any(f >= n_feat or f < 0 for f in layer.used_features()):
                problems.append(('feature index outside the %d available' % n_feat,
                                 'model.layers.%d.feature' % k))
        n_layers = len(m.layers)
        slots = list(range(n_layers + 1)) if m.slots is None else m.slots
        if any(s < 0 or s > n_layers for s in slots):
            problems.append(('slots must lie in [0, %d]' % n_layers, 'model.slots'))
        if m.kind == 'variational' and len(m.blocks) != len(slots):
            problems.append(('one block list per slot is required (%d slots)' % len(slots),
                             'model.blocks'))
        return problems


def _error_paths(err):
    return ['.'.join(str(p) for p in e['loc']) or '<root>' for e in err.errors()]


def load_config(path):
    """Read and validate a run configuration; raises ConfigError on any violation."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Configuration file {path} does not exist")
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path} is not valid JSON ({err})")
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as err:
        detail = '; '.join('%s: %s' % ('.'.join(str(p) for p in e['loc']), e['msg'])
                           for e in err.errors())
        raise ConfigError(f"Invalid configuration {path} ({detail})", _error_paths(err))
    problems = cfg.cross_check()
    if problems:
        detail = '; '.join('%s: %s' % (p, msg) for msg, p in problems)
        raise ConfigError(f"Inconsistent configuration {path} ({detail})",
                          [p for _, p in problems])
    return cfg


def config_hash(cfg):
    """SHA-256 of the canonical JSON dump of a validated configuration."""
    dump = json.dumps(cfg.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(dump.encode()).hexdigest()
