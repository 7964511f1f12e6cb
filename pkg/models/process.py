"""
Process model
Represents one isotropic unimodal pure-jump Lévy process and the domains it runs in
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

import config
from utils.grids import log_grid

# Kinds whose exponent is ψ(ξ) = φ(|ξ|²) for a subordinator with Laplace exponent φ
SUBORDINATE_KINDS = ('stable', 'relativistic', 'geometric_stable', 'conjugate_vg')

# Kinds whose exponent only exists through the Lévy-Khintchine integral
LEVY_MEASURE_KINDS = ('truncated_stable', 'counterexample')

KINDS = SUBORDINATE_KINDS + LEVY_MEASURE_KINDS


@dataclass(frozen=True)
class ProcessSpec:
    """Full description of a process: kind, dimension, parameters, grid and flags"""

    kind: str
    dimension: int
    parameters: Tuple[Tuple[str, float], ...] = ()
    spec_id: str = ''
    r_min: float = config.GRID_R_MIN
    r_max: float = config.GRID_R_MAX
    points: int = config.GRID_POINTS
    unimodal: bool = True
    transient: Optional[bool] = field(default=None)

    # ================================================
    # PARAMETERS
    # ================================================

    @property
    def params(self) -> Dict[str, float]:
        return dict(self.parameters)

    def param(self, name: str, default: Optional[float] = None) -> float:
        """Get a parameter value, raising KeyError when absent and no default given"""
        for key, value in self.parameters:
            if key == name:
                return value
        if default is None:
            raise KeyError(f"Spec '{self.label}' has no parameter '{name}'")
        return default

    @property
    def label(self) -> str:
        return self.spec_id or f"{self.kind}_d{self.dimension}"

    # ================================================
    # DERIVED FLAGS
    # ================================================

    @property
    def is_subordinate(self) -> bool:
        """True when the process is a subordinate Brownian motion"""
        return self.kind in SUBORDINATE_KINDS

    @property
    def is_transient(self) -> bool:
        if self.transient is not None:
            return self.transient
        return self.dimension >= 3

    @property
    def psi_source(self) -> str:
        if self.kind == 'stable':
            return 'closed_form'
        if self.kind in SUBORDINATE_KINDS:
            return 'from_laplace'
        return 'from_levy_measure'

    @property
    def stability_index(self) -> Optional[float]:
        """α for globally scaling (stable) specs, None otherwise"""
        if self.kind == 'stable':
            return self.param('alpha')
        return None

    @property
    def is_cauchy(self) -> bool:
        return self.kind == 'stable' and self.param('alpha') == 1.0

    @property
    def grid(self) -> np.ndarray:
        """Default log-spaced radial grid of this spec"""
        return log_grid(self.r_min, self.r_max, self.points)

    def with_dimension(self, dimension: int) -> 'ProcessSpec':
        """Same process in another dimension (same exponent ψ)"""
        return replace(self, dimension=dimension, transient=None)

    # ================================================
    # SERIALIZATION
    # ================================================

    @classmethod
    def from_dict(cls, data: dict) -> 'ProcessSpec':
        """Create ProcessSpec from a parsed spec file (key-value tree)"""
        grid = data.get('grid', {}) or {}
        flags = data.get('flags', {}) or {}
        parameters = data.get('parameters', {}) or {}
        return cls(
            kind=data['kind'],
            dimension=int(data['dimension']),
            parameters=tuple(sorted((str(k), float(v)) for k, v in parameters.items())),
            spec_id=data.get('id', ''),
            r_min=float(grid.get('r_min', config.GRID_R_MIN)),
            r_max=float(grid.get('r_max', config.GRID_R_MAX)),
            points=int(grid.get('points', config.GRID_POINTS)),
            unimodal=bool(flags.get('unimodal', True)),
            transient=flags.get('transient'),
        )

    def to_dict(self) -> dict:
        """Convert to dictionary"""
        flags = {'unimodal': self.unimodal}
        if self.transient is not None:
            flags['transient'] = self.transient
        return {
            'id': self.spec_id,
            'kind': self.kind,
            'dimension': self.dimension,
            'parameters': dict(self.parameters),
            'grid': {'r_min': self.r_min, 'r_max': self.r_max, 'points': self.points},
            'flags': flags,
        }

    def __str__(self) -> str:
        params = ", ".join(f"{k}={v:g}" for k, v in self.parameters)
        return f"{self.label} [{self.kind}, d={self.dimension}{', ' + params if params else ''}]"


@dataclass(frozen=True)
class Ball:
    """Ball B(center, radius); with inner_radius > 0 the annulus between the two spheres"""

    center: Tuple[float, ...]
    radius: float
    inner_radius: float = 0.0

    @classmethod
    def centered(cls, dimension: int, radius: float, inner_radius: float = 0.0) -> 'Ball':
        return cls(center=(0.0,) * dimension, radius=radius, inner_radius=inner_radius)

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def is_annulus(self) -> bool:
        return self.inner_radius > 0

    def _norms(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(pts - np.asarray(self.center), axis=-1)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Vectorized open-set membership test for an (n, d) array of points"""
        norms = self._norms(points)
        inside = norms < self.radius
        if self.is_annulus:
            inside &= norms > self.inner_radius
        return inside

    def distance_to_boundary(self, point) -> float:
        """δ_D(x) for a single point"""
        norm = float(self._norms(point)[0])
        delta = self.radius - norm
        if self.is_annulus:
            delta = min(delta, norm - self.inner_radius)
        return delta

    @classmethod
    def from_dict(cls, data: dict) -> 'Ball':
        return cls(
            center=tuple(float(c) for c in data['center']),
            radius=float(data['radius']),
            inner_radius=float(data.get('inner_radius', 0.0)),
        )

    def to_dict(self) -> dict:
        return {'center': list(self.center), 'radius': self.radius, 'inner_radius': self.inner_radius}

    def __str__(self) -> str:
        if self.is_annulus:
            return f"A({self.center}, {self.inner_radius:g}, {self.radius:g})"
        return f"B({self.center}, {self.radius:g})"
