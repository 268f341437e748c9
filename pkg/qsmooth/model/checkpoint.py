"""
JSON checkpoints of trained classifiers.
"""
import json
import logging
import os
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .._version import __version__
from .classifier import ClassifierSpec

__all__ = ['CHECKPOINT_FORMAT', 'CHECKPOINT_VERSION', 'Checkpoint', 'save_checkpoint',
           'load_checkpoint']

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'qsmooth-checkpoint'
CHECKPOINT_VERSION = 1


class Checkpoint(BaseModel):
    model_config = ConfigDict(extra='forbid')

    format: Literal['qsmooth-checkpoint'] = CHECKPOINT_FORMAT
    version: Literal[1] = CHECKPOINT_VERSION
    kind: Literal['variational', 'kernel'] = 'variational'
    classifier: Dict[str, Any]
    kernel: Optional[Dict[str, Any]] = None
    losses: List[float] = Field(default_factory=list)
    config_sha256: Optional[str] = None
    qsmooth_version: Optional[str] = None


def save_checkpoint(path, spec, losses=None, kind='variational', kernel=None,
                    config_sha256=None):
    """Write ``spec`` (a ClassifierSpec) and its training record to ``path``."""
    ckpt = Checkpoint(kind=kind, classifier=spec.to_dict(),
                      kernel=None if kernel is None else kernel.to_dict(),
                      losses=[] if losses is None else [float(v) for v in losses],
                      config_sha256=config_sha256, qsmooth_version=__version__)
    with open(path, 'w') as f:
        f.write(ckpt.model_dump_json(indent=1))
    log.info('saved checkpoint %s', path)
    return path


def load_checkpoint(path):
    """Read a checkpoint; returns ``(ClassifierSpec, Checkpoint)``."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Checkpoint {path} does not exist")
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as err:
            raise ValueError(f"Checkpoint {path} is not valid JSON: {err}")
    try:
        ckpt = Checkpoint.model_validate(raw)
    except ValidationError as err:
        raise ValueError(f"Checkpoint {path} does not match the {CHECKPOINT_FORMAT} "
                         f"v{CHECKPOINT_VERSION} layout:\n{err}")
    return ClassifierSpec.from_dict(ckpt.classifier), ckpt
