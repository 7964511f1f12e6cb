"""
RadialProfile model
Immutable tabulation of a radial function on a log-spaced grid
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from utils.grids import log_derivative, power_law_exponent, radial_mass


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Tabulated radial function f(|x|) on R^d

    kind is one of 'transition_density', 'levy_density', 'potential' or
    'generic'; mass is None for functions that are not integrable (Lévy
    densities), otherwise the total integral over R^d.
    """

    grid: np.ndarray
    values: np.ndarray
    d: int
    kind: str = 'generic'
    t: Optional[float] = None
    mass: Optional[float] = None
    monotone: bool = False
    origin_finite: bool = True
    derivative: Optional[np.ndarray] = None
    approximate: bool = False
    spec_id: str = ''
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'grid', _frozen(self.grid))
        object.__setattr__(self, 'values', _frozen(self.values))
        if self.derivative is not None:
            object.__setattr__(self, 'derivative', _frozen(self.derivative))

        if self.grid.ndim != 1 or self.grid.size != self.values.size:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.grid) <= 0) or self.grid[0] <= 0:
            raise ValueError("grid must be positive and strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite at every grid point")
        if self.monotone and np.any(np.diff(self.values) > 1e-12 * np.max(np.abs(self.values))):
            raise ValueError("monotone flag set but values increase along the grid")

    @classmethod
    def tabulate(cls, grid: np.ndarray, values: np.ndarray, d: int, kind: str = 'generic',
                 with_mass: bool = True, **kwargs) -> 'RadialProfile':
        """Build a profile, computing the mass from the values when requested"""
        mass = radial_mass(grid, values, d) if with_mass else None
        return cls(grid=grid, values=values, d=d, kind=kind, mass=mass, **kwargs)

    # ================================================
    # EVALUATION
    # ================================================

    @cached_property
    def _interpolant(self):
        u = np.log(self.grid)
        if np.all(self.values > 0):
            spline = CubicSpline(u, np.log(self.values))
            return lambda x: np.exp(spline(x))
        return PchipInterpolator(u, self.values)

    def _extrapolate(self, r: np.ndarray, left: bool) -> np.ndarray:
        i, j = (0, 1) if left else (-2, -1)
        r1, r2 = self.grid[i], self.grid[j]
        v1, v2 = self.values[i], self.values[j]
        anchor_r, anchor_v = (r1, v1) if left else (r2, v2)
        slope = power_law_exponent(r1, v1, r2, v2)
        if slope is None:
            return np.full_like(r, anchor_v if left else 0.0)
        return anchor_v * (r / anchor_r) ** slope

    def __call__(self, r) -> np.ndarray:
        """Interpolate in log-log space; power-law extrapolation off the grid"""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        lo = r < self.grid[0]
        hi = r > self.grid[-1]
        mid = ~(lo | hi)
        if np.any(mid):
            out[mid] = self._interpolant(np.log(r[mid]))
        if np.any(lo):
            out[lo] = self._extrapolate(r[lo], left=True)
        if np.any(hi):
            out[hi] = self._extrapolate(r[hi], left=False)
        return out[0] if scalar else out

    def derivative_values(self) -> np.ndarray:
        """Stored analytic derivative when present, else log-grid finite differences"""
        if self.derivative is not None:
            return np.array(self.derivative)
        return log_derivative(self.grid, self.values)

    def recomputed_mass(self) -> float:
        return radial_mass(self.grid, self.values, self.d)

    def check_mass(self, rtol: float = 1e-6) -> bool:
        """Stored mass agrees with the mass recomputed from the values"""
        if self.mass is None:
            return True
        recomputed = self.recomputed_mass()
        return bool(abs(recomputed - self.mass) <= rtol * abs(self.mass))

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))

    # ================================================
    # SERIALIZATION
    # ================================================

    def sidecar(self) -> dict:
        """JSON sidecar metadata (everything except the arrays)"""
        return {
            'd': self.d,
            'kind': self.kind,
            't': self.t,
            'mass': self.mass,
            'monotone': self.monotone,
            'origin_finite': self.origin_finite,
            'approximate': self.approximate,
            'spec_id': self.spec_id,
            'points': int(self.grid.size),
            'r_min': float(self.grid[0]),
            'r_max': float(self.grid[-1]),
            'meta': self.meta,
        }

    def to_dict(self) -> dict:
        data = self.sidecar()
        data['grid'] = self.grid.tolist()
        data['values'] = self.values.tolist()
        if self.derivative is not None:
            data['derivative'] = self.derivative.tolist()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'RadialProfile':
        return cls(
            grid=np.asarray(data['grid']),
            values=np.asarray(data['values']),
            d=int(data['d']),
            kind=data.get('kind', 'generic'),
            t=data.get('t'),
            mass=data.get('mass'),
            monotone=bool(data.get('monotone', False)),
            origin_finite=bool(data.get('origin_finite', True)),
            derivative=np.asarray(data['derivative']) if data.get('derivative') is not None else None,
            approximate=bool(data.get('approximate', False)),
            spec_id=data.get('spec_id', ''),
            meta=data.get('meta', {}) or {},
        )

    def __str__(self) -> str:
        t = f", t={self.t:g}" if self.t is not None else ""
        mass = f", mass={self.mass:.6g}" if self.mass is not None else ""
        return f"RadialProfile({self.kind}, d={self.d}{t}, n={self.grid.size}{mass})"
