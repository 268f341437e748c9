"""
Robustness certificates for smoothed classifiers:

- trace-distance bounds between smoothed encodings (closed form, quadrature,
  Monte Carlo)
- certified radii for the smoothing strategies
- Clopper-Pearson lower bounds for shot-based certification
- per-point certificates and certified-accuracy curves

"""
from .bounds import (TraceBoundResult, gaussian_parallel_bound, gaussian_sequential_bound,
                     generic_bound_1d, generic_bound_Ld)
from .radius import (UNIFORM_FORMULAS, radius_exponential, radius_uniform, radius_from_weights,
                     threshold_adjusted, clopper_pearson_lower)
from .certificate import (MODES, CERTIFICATE_COLUMNS, Certificate, certify_point,
                          certify_dataset, curve_from_certificates, certified_curve,
                          certificates_to_frame)
