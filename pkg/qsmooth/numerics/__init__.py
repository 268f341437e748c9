"""
Dense complex linear algebra and the statistics kit the other modules build on:

- Hermitian eigen-decomposition (LAPACK or cyclic Jacobi)
- trace distance, tensor products and spectral norms
- the validated ``DensityMatrix`` state type
- standard-normal CDF and quantile

"""
from .linalg import (NotHermitianError, hermitian_asymmetry, check_hermitian, is_unitary,
                     check_unitary, eig_hermitian, trace_distance, tensor_product, spectral_norm)
from .states import DensityMatrix, InvalidStateError
from .stats import std_normal_cdf, std_normal_quantile
