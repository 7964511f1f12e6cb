"""
Sampling models
Monte Carlo configuration, exit events and harmonic estimates
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

import config
from models.process import Ball


@dataclass(frozen=True)
class PathConfig:
    """Skeleton-walk configuration; identical configs replay identical streams"""

    dt: float = config.DEFAULT_DT
    max_time: float = config.DEFAULT_MAX_TIME
    seed: int = config.DEFAULT_SEED
    n_paths: int = config.DEFAULT_N_PATHS
    refinement: int = config.DEFAULT_REFINEMENT
    block_size: int = config.RNG_BLOCK_SIZE
    workers: int = config.MAX_WORKERS

    def __post_init__(self):
        object.__setattr__(self, 'dt', float(self.dt))
        object.__setattr__(self, 'max_time', float(self.max_time))
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.max_time <= self.dt:
            raise ValueError("max_time must exceed dt")
        if self.refinement < 0:
            raise ValueError("refinement depth must be >= 0")

    def halved(self) -> 'PathConfig':
        """Same stream keys, half the time step"""
        return replace(self, dt=self.dt / 2.0)

    def with_seed(self, seed: int) -> 'PathConfig':
        return replace(self, seed=seed)

    def with_paths(self, n_paths: int) -> 'PathConfig':
        return replace(self, n_paths=n_paths)

    @classmethod
    def from_dict(cls, data: dict) -> 'PathConfig':
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class ExitSample:
    """One exit event: τ within [tau_lower, tau], last inside and first outside skeleton points"""

    tau: float
    tau_lower: float
    x_pre: Tuple[float, ...]
    x_exit: Tuple[float, ...]
    overshoot: float
    censored: bool
    domain: Ball

    def to_dict(self) -> dict:
        return {
            'tau': self.tau,
            'tau_lower': self.tau_lower,
            'x_pre': list(self.x_pre),
            'x_exit': list(self.x_exit),
            'overshoot': self.overshoot,
            'censored': self.censored,
            'domain': self.domain.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ExitSample':
        return cls(
            tau=float(data['tau']),
            tau_lower=float(data['tau_lower']),
            x_pre=tuple(data['x_pre']),
            x_exit=tuple(data['x_exit']),
            overshoot=float(data['overshoot']),
            censored=bool(data['censored']),
            domain=Ball.from_dict(data['domain']),
        )


@dataclass
class ExitSamples:
    """Columnar batch of exit events from one skeleton run"""

    tau: np.ndarray
    tau_lower: np.ndarray
    x_pre: np.ndarray
    x_exit: np.ndarray
    censored: np.ndarray
    domain: Ball
    dt: float
    seed: int

    def __len__(self) -> int:
        return int(self.tau.size)

    def __getitem__(self, i: int) -> ExitSample:
        return ExitSample(
            tau=float(self.tau[i]),
            tau_lower=float(self.tau_lower[i]),
            x_pre=tuple(self.x_pre[i]),
            x_exit=tuple(self.x_exit[i]),
            overshoot=float(self.overshoot[i]),
            censored=bool(self.censored[i]),
            domain=self.domain,
        )

    @property
    def overshoot(self) -> np.ndarray:
        """Distance of the first outside skeleton point beyond the boundary"""
        norms = np.linalg.norm(self.x_exit - np.asarray(self.domain.center), axis=1)
        beyond = norms - self.domain.radius
        if self.domain.is_annulus:
            beyond = np.where(norms <= self.domain.inner_radius,
                              self.domain.inner_radius - norms, beyond)
        return np.where(self.censored, 0.0, np.maximum(beyond, 0.0))

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(self.censored)) if len(self) else 0.0

    @property
    def exited(self) -> np.ndarray:
        return ~self.censored

    def rows(self):
        """CSV rows: tau, then exit coordinates"""
        for tau, x, c in zip(self.tau, self.x_exit, self.censored):
            if not c:
                yield [float(tau)] + [float(v) for v in x]


@dataclass
class HarmonicEstimate:
    """Monte Carlo estimate of E^x f(X(τ_B))"""

    value: float
    stderr: float
    n: int
    censored_fraction: float = 0.0
    heavy_tail: bool = False
    mean_value_agrees: Optional[bool] = None
    seed: Optional[int] = None
    notes: dict = field(default_factory=dict)

    @classmethod
    def from_terms(cls, terms: np.ndarray, censored_fraction: float = 0.0,
                   seed: Optional[int] = None) -> 'HarmonicEstimate':
        """Mean, standard error and heavy-tail flag from per-path terms"""
        terms = np.asarray(terms, dtype=float)
        n = int(terms.size)
        value = float(np.mean(terms)) if n else float('nan')
        stderr = float(np.std(terms, ddof=1) / np.sqrt(n)) if n > 1 else float('inf')
        total = float(np.sum(np.abs(terms)))
        heavy = bool(n and total > 0 and float(np.max(np.abs(terms))) > 0.1 * total)
        return cls(value=value, stderr=stderr, n=n, censored_fraction=censored_fraction,
                   heavy_tail=heavy, seed=seed)

    def to_dict(self) -> dict:
        return {
            'estimate': self.value,
            'stderr': self.stderr,
            'n': self.n,
            'censored_fraction': self.censored_fraction,
            'heavy_tail': self.heavy_tail,
            'mean_value_agrees': self.mean_value_agrees,
            'seed': self.seed,
            'notes': self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'HarmonicEstimate':
        return cls(
            value=float(data['estimate']),
            stderr=float(data['stderr']),
            n=int(data['n']),
            censored_fraction=float(data.get('censored_fraction', 0.0)),
            heavy_tail=bool(data.get('heavy_tail', False)),
            mean_value_agrees=data.get('mean_value_agrees'),
            seed=data.get('seed'),
            notes=data.get('notes', {}) or {},
        )

    def __str__(self) -> str:
        flag = " (heavy tail)" if self.heavy_tail else ""
        return f"{self.value:.6g} ± {self.stderr:.2g} (n={self.n}){flag}"


@dataclass(frozen=True)
class ReflectedPoint:
    """Point of the open half-space {x₁ > 0} with its mirror image x̂"""

    x: Tuple[float, ...]

    def __post_init__(self):
        if not self.x or self.x[0] <= 0:
            raise ValueError(f"ReflectedPoint needs x₁ > 0, got {self.x}")

    @property
    def hat(self) -> Tuple[float, ...]:
        return reflect(self.x)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


def reflect(x) -> Tuple[float, ...]:
    """x̂ = (−x₁, x₂, …, x_d); an involution fixing {x₁ = 0}"""
    x = tuple(float(v) for v in np.atleast_1d(x))
    return (-x[0],) + x[1:]
