"""
Data models for the toolkit
"""

from .process import ProcessSpec, Ball, KINDS, SUBORDINATE_KINDS, LEVY_MEASURE_KINDS
from .profile import RadialProfile
from .reports import ScalingReport, HypothesisReport, BoundReport, CounterexampleReport
from .samples import PathConfig, ExitSample, ExitSamples, HarmonicEstimate, ReflectedPoint, reflect
from .manifest import RunManifest

__all__ = [
    'ProcessSpec',
    'Ball',
    'KINDS',
    'SUBORDINATE_KINDS',
    'LEVY_MEASURE_KINDS',
    'RadialProfile',
    'ScalingReport',
    'HypothesisReport',
    'BoundReport',
    'CounterexampleReport',
    'PathConfig',
    'ExitSample',
    'ExitSamples',
    'HarmonicEstimate',
    'ReflectedPoint',
    'reflect',
    'RunManifest',
]
