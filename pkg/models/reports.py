"""
Report models
Scaling, hypothesis and bound reports produced by the checkers
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np


def _num(value) -> Optional[float]:
    """JSON-safe float (inf/nan become strings)"""
    if value is None:
        return None
    value = float(value)
    if np.isfinite(value):
        return value
    return str(value)  # type: ignore[return-value]


@dataclass
class ScalingReport:
    """Outcome of a WLSC / WUSC grid scan"""

    condition: str            # 'WLSC' or 'WUSC'
    exponent: float
    theta0: float
    constant: float           # largest C̲ (WLSC) or smallest C̄ (WUSC) on the grid
    violation: float          # drift of the constant when the grid is widened (1 = none)
    passed: bool
    witness: tuple            # (λ, θ) pair attaining the constant
    target: str = 'psi'
    tolerance: float = 0.10
    spec_id: str = ''

    def to_dict(self) -> dict:
        return {
            'condition': self.condition,
            'exponent': self.exponent,
            'theta0': self.theta0,
            'constant': _num(self.constant),
            'violation': _num(self.violation),
            'passed': self.passed,
            'witness': [_num(w) for w in self.witness],
            'target': self.target,
            'tolerance': self.tolerance,
            'spec_id': self.spec_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ScalingReport':
        return cls(
            condition=data['condition'],
            exponent=float(data['exponent']),
            theta0=float(data['theta0']),
            constant=float(data['constant']),
            violation=float(data['violation']),
            passed=bool(data['passed']),
            witness=tuple(float(w) for w in data['witness']),
            target=data.get('target', 'psi'),
            tolerance=float(data.get('tolerance', 0.10)),
            spec_id=data.get('spec_id', ''),
        )

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.condition}({self.exponent:g}, θ₀={self.theta0:g}) on {self.target}: "
                f"C={self.constant:.4g} drift={self.violation:.4g} [{status}]")


@dataclass
class HypothesisReport:
    """Outcome of one hypothesis predicate checked on a grid"""

    hypothesis: str
    passed: bool
    witness: Dict[str, float]     # worst grid point, e.g. {'r': 1.0, 'ratio': 2.0}
    constant: Optional[float]     # fitted a₁ / C̄ / δ
    grid: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    spec_id: str = ''
    approximate: bool = False
    notes: str = ''

    def to_dict(self) -> dict:
        return {
            'hypothesis': self.hypothesis,
            'passed': self.passed,
            'witness': {k: _num(v) for k, v in self.witness.items()},
            'constant': _num(self.constant),
            'grid': [_num(g) for g in self.grid],
            'values': [_num(v) for v in self.values],
            'spec_id': self.spec_id,
            'approximate': self.approximate,
            'notes': self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'HypothesisReport':
        constant = data.get('constant')
        return cls(
            hypothesis=data['hypothesis'],
            passed=bool(data['passed']),
            witness={k: float(v) for k, v in data.get('witness', {}).items()},
            constant=float(constant) if constant is not None else None,
            grid=[float(g) for g in data.get('grid', [])],
            values=[float(v) for v in data.get('values', [])],
            spec_id=data.get('spec_id', ''),
            approximate=bool(data.get('approximate', False)),
            notes=data.get('notes', ''),
        )

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        constant = f" constant={self.constant:.4g}" if self.constant is not None else ""
        where = ", ".join(f"{k}={v:.4g}" for k, v in self.witness.items())
        return f"{self.hypothesis}: [{status}]{constant} witness({where})"


@dataclass
class BoundReport:
    """
    One checked inequality LHS <= c * RHS over a grid

    ratio = lhs / rhs. With fit_mode 'fixed_constant' the check passes when
    max ratio <= 1 + tolerance; with 'fit_constant' the constant is the max
    ratio and the check passes when it is finite (and, if a refinement was
    supplied, stable within tolerance).
    """

    name: str
    points: List[Dict[str, float]]
    lhs: np.ndarray
    rhs: np.ndarray
    fit_mode: str = 'fit_constant'
    tolerance: float = 0.10
    spec_id: str = ''
    excluded: int = 0
    details: Dict[str, Any] = field(default_factory=dict)
    max_ratio: float = field(init=False)
    constant: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = np.asarray(self.lhs, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        ratios = self.ratios
        self.max_ratio = float(np.max(ratios)) if ratios.size else float('nan')
        self.constant = self.max_ratio
        if self.fit_mode == 'fixed_constant':
            self.passed = bool(ratios.size and self.max_ratio <= 1.0 + self.tolerance)
        else:
            self.passed = bool(ratios.size and np.isfinite(self.max_ratio))

    @property
    def ratios(self) -> np.ndarray:
        with np.errstate(divide='ignore', invalid='ignore'):
            ratios = np.where(self.rhs > 0, self.lhs / self.rhs,
                              np.where(self.lhs <= 0, 0.0, np.inf))
        return ratios

    @property
    def witness(self) -> Dict[str, float]:
        if not self.points:
            return {}
        return dict(self.points[int(np.argmax(self.ratios))])

    def require_stable(self, refined: 'BoundReport') -> bool:
        """Compare the fitted constant with one from a refined grid; fail if it drifts"""
        if not (np.isfinite(self.constant) and np.isfinite(refined.constant)) or self.constant == 0:
            stable = self.constant == refined.constant
        else:
            stable = abs(refined.constant - self.constant) <= self.tolerance * abs(self.constant)
        self.details['refined_constant'] = refined.constant
        self.details['refinement_stable'] = bool(stable)
        if self.fit_mode == 'fit_constant':
            self.passed = self.passed and bool(stable)
        return bool(stable)

    @classmethod
    def merge(cls, name: str, reports: Sequence['BoundReport'], **kwargs) -> 'BoundReport':
        """Concatenate several reports of the same fit mode into one"""
        points: List[Dict[str, float]] = []
        for report in reports:
            points.extend(dict(p, inequality=report.name) for p in report.points)
        merged = cls(
            name=name,
            points=points,
            lhs=np.concatenate([r.lhs for r in reports]) if reports else np.array([]),
            rhs=np.concatenate([r.rhs for r in reports]) if reports else np.array([]),
            fit_mode=reports[0].fit_mode if reports else 'fit_constant',
            tolerance=reports[0].tolerance if reports else 0.10,
            excluded=sum(r.excluded for r in reports),
            **kwargs,
        )
        merged.details['parts'] = {r.name: r.max_ratio for r in reports}
        return merged

    # ================================================
    # SERIALIZATION
    # ================================================

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'spec_id': self.spec_id,
            'fit_mode': self.fit_mode,
            'tolerance': self.tolerance,
            'max_ratio': _num(self.max_ratio),
            'constant': _num(self.constant),
            'passed': self.passed,
            'excluded': self.excluded,
            'witness': {k: _num(v) if not isinstance(v, str) else v for k, v in self.witness.items()},
            'details': self.details,
            'grid': [
                {**{k: _num(v) if not isinstance(v, str) else v for k, v in p.items()},
                 'lhs': _num(l), 'rhs': _num(r)}
                for p, l, r in zip(self.points, self.lhs, self.rhs)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'BoundReport':
        grid = data.get('grid', [])
        points = [{k: v for k, v in row.items() if k not in ('lhs', 'rhs')} for row in grid]
        return cls(
            name=data['name'],
            points=points,
            lhs=np.array([float(row['lhs']) for row in grid]),
            rhs=np.array([float(row['rhs']) for row in grid]),
            fit_mode=data.get('fit_mode', 'fit_constant'),
            tolerance=float(data.get('tolerance', 0.10)),
            spec_id=data.get('spec_id', ''),
            excluded=int(data.get('excluded', 0)),
            details=data.get('details', {}) or {},
        )

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name}: max ratio {self.max_ratio:.4g} over {len(self.points)} points "
                f"({self.excluded} excluded) [{status}]")


@dataclass
class CounterexampleReport:
    """
    Exponent fits for the non-differentiable harmonic function example

    g_*: exponent of y ↦ g(y) - g(-y) against 1 - β + γ;
    f_*: local exponent of the lower envelope of x ↦ f(x) - f(-x) on the smallest
    decade, which must stay below f_threshold for the difference quotient to blow up
    at 0; f_leading is the envelope before the killed bound is subtracted.
    """

    alpha: float
    gamma: float
    beta: float
    g_exponent: float
    g_expected: float
    g_tolerance: float
    f_exponent: float
    f_threshold: float
    quotient_growing: bool
    y: np.ndarray = field(default_factory=lambda: np.array([]))
    g_difference: np.ndarray = field(default_factory=lambda: np.array([]))
    x: np.ndarray = field(default_factory=lambda: np.array([]))
    f_difference: np.ndarray = field(default_factory=lambda: np.array([]))
    f_leading: np.ndarray = field(default_factory=lambda: np.array([]))
    killed_bound: np.ndarray = field(default_factory=lambda: np.array([]))

    @property
    def g_passed(self) -> bool:
        return bool(abs(self.g_exponent - self.g_expected) <= self.g_tolerance)

    @property
    def f_passed(self) -> bool:
        return bool(self.f_exponent < self.f_threshold)

    @property
    def passed(self) -> bool:
        return self.g_passed and self.f_passed

    @property
    def predicted_exponent(self) -> float:
        """1 + α - β + γ, in (0, 1) for feasible parameters"""
        return 1.0 + self.alpha - self.beta + self.gamma

    def rows(self):
        """CSV rows: series, abscissa, difference"""
        for y, g in zip(self.y, self.g_difference):
            yield ['g', float(y), float(g)]
        for x, f in zip(self.x, self.f_difference):
            yield ['f', float(x), float(f)]
        for x, f in zip(self.x, self.f_leading):
            yield ['f_leading', float(x), float(f)]

    def to_dict(self) -> dict:
        return {
            'alpha': self.alpha,
            'gamma': self.gamma,
            'beta': self.beta,
            'g_exponent': _num(self.g_exponent),
            'g_expected': self.g_expected,
            'g_tolerance': self.g_tolerance,
            'g_passed': self.g_passed,
            'f_exponent': _num(self.f_exponent),
            'f_threshold': self.f_threshold,
            'f_passed': self.f_passed,
            'predicted_exponent': self.predicted_exponent,
            'quotient_growing': self.quotient_growing,
            'passed': self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CounterexampleReport':
        return cls(
            alpha=float(data['alpha']),
            gamma=float(data['gamma']),
            beta=float(data['beta']),
            g_exponent=float(data['g_exponent']),
            g_expected=float(data['g_expected']),
            g_tolerance=float(data['g_tolerance']),
            f_exponent=float(data['f_exponent']),
            f_threshold=float(data['f_threshold']),
            quotient_growing=bool(data['quotient_growing']),
        )

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"counterexample (α={self.alpha:g}, γ={self.gamma:g}, β={self.beta:g}): "
                f"g exponent {self.g_exponent:.4f} (expected {self.g_expected:.4f}), "
                f"f exponent {self.f_exponent:.4f} (< {self.f_threshold:g}) [{status}]")
