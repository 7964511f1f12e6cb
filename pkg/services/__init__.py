"""
Numerical engines and output services
"""

from .quadrature import BesselKernelQuadrature, QuadratureResult, bessel_kernel, bessel_zeros, euler_average
from .rng import block_generator, block_ranges, map_blocks
from .persistence import OutputWriter, render_table, read_json
from . import stable_ball

__all__ = [
    'BesselKernelQuadrature',
    'QuadratureResult',
    'bessel_kernel',
    'bessel_zeros',
    'euler_average',
    'block_generator',
    'block_ranges',
    'map_blocks',
    'OutputWriter',
    'render_table',
    'read_json',
    'stable_ball',
]
