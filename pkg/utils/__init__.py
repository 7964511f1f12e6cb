"""
Utility functions
"""

from .grids import (
    log_grid,
    unit_sphere_area,
    is_log_uniform,
    log_derivative,
    power_law_exponent,
    radial_mass,
    fit_log_slope
)
from .hashing import canonical_json, canonical_hash, file_hash

__all__ = [
    'log_grid',
    'unit_sphere_area',
    'is_log_uniform',
    'log_derivative',
    'power_law_exponent',
    'radial_mass',
    'fit_log_slope',
    'canonical_json',
    'canonical_hash',
    'file_hash'
]
