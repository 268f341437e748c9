"""
Randomized smoothing of encoding circuits: noise laws, smoothing channels,
product-feature smoothing and smoothed sequential states.
"""
from .distributions import (SmoothingDistribution, GaussianDistribution, UniformDistribution,
                            CustomDistribution, Distribution)
from .channels import (PSDViolationError, SmoothingMatrix, QuantumChannel, build_A, kraus_from_A,
                       apply_channel, phase_damping, pd_param, conjugated_channel,
                       identity_channel)
from .nonlinear import nonlinear_pd_param, nonlinear_smoothing_matrix, cross_term
from .smoothing import (STRATEGIES, Smoothing, as_smoothing, mc_smoothed_state,
                        smooth_sequential_state)
