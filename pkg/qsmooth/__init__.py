"""
qsmooth: randomized smoothing of quantum data-encoding classifiers.

Density-matrix simulation of smoothed encodings, certified robustness radii
and gradient attacks.
"""
from . import numerics
from . import encoding
from . import smoothing
from . import model
from . import certify
from . import attack
from . import data

from ._version import __version__
