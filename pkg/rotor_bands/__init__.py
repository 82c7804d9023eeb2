# coding=utf-8

"""
Quasi-energy bands of the quantum kicked rotor at resonance.
"""

from .__version__ import __version__
from .bands import BandStructure, band_widths, flatness_test, gd_determinant, spectral_projector, sweep_bands, \
    track_bands
from .exceptions import RotorBandsException, InvalidInput
from .floquet import UnitaryMatrix, build_C, build_G, build_S, build_V, build_X, verify_direct_integral
from .number_theory import decay_fit, gamma_bound, gauss_partial_sum, log_diagonal_product
from .perturbation import alpha_exponent, path_sum_coefficient, scaling_fit
from .resonance import ResonanceParams, primitive_resonance, unperturbed_eigenvalues, validate_resonance

__all__ = [
    '__version__',
    'BandStructure', 'band_widths', 'flatness_test', 'gd_determinant', 'spectral_projector', 'sweep_bands',
    'track_bands',
    'RotorBandsException', 'InvalidInput',
    'UnitaryMatrix', 'build_C', 'build_G', 'build_S', 'build_V', 'build_X', 'verify_direct_integral',
    'decay_fit', 'gamma_bound', 'gauss_partial_sum', 'log_diagonal_product',
    'alpha_exponent', 'path_sum_coefficient', 'scaling_fit',
    'ResonanceParams', 'primitive_resonance', 'unperturbed_eigenvalues', 'validate_resonance',
]
