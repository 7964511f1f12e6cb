"""
Computation modules: symbols, transforms, Lévy measures, sampling,
the half-space difference kernel, estimates and the CLI commands
"""

from . import symbols, transforms, levy_measures, sampling, difference, estimates, commands

__all__ = [
    'symbols',
    'transforms',
    'levy_measures',
    'sampling',
    'difference',
    'estimates',
    'commands'
]
