"""
Symbols
Laplace and characteristic exponents, the maximal exponent ψ*, the scale
function L and the weak scaling checkers
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import binom

import config
from config import logger
from errors import RangeError, UnsupportedRouteError
from models.process import ProcessSpec
from models.profile import RadialProfile
from models.reports import HypothesisReport, ScalingReport
from services.quadrature import levy_khintchine_integral

LAPLACE_KINDS = ('stable', 'relativistic', 'geometric_stable', 'conjugate_vg', 'gamma')

# λ grids for the scaling and Bernstein scans
_LAMBDA_DECADES = 6
_SCAN_PER_DECADE = 10


# ================================================
# LAPLACE EXPONENTS
# ================================================

@dataclass(frozen=True)
class LaplaceExponent:
    """
    Laplace exponent φ of a subordinator, E e^{-λS_t} = e^{-tφ(λ)}

    stable: φ(λ) = λ^{α/2}; relativistic: √(λ+m²) - m;
    geometric_stable: log(1 + λ^{β/2}); conjugate_vg: λ/log(1+λ) - 1;
    gamma: log(1 + λ).
    """

    kind: str
    parameters: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.kind not in LAPLACE_KINDS:
            raise UnsupportedRouteError(f"no Laplace exponent for kind '{self.kind}'")

    @classmethod
    def for_spec(cls, spec: ProcessSpec) -> 'LaplaceExponent':
        if not spec.is_subordinate:
            raise UnsupportedRouteError(f"{spec.label} is not a subordinate Brownian motion",
                                        {'kind': spec.kind})
        if spec.kind == 'geometric_stable' and spec.param('beta') == 2.0:
            return cls('gamma')
        return cls(spec.kind, spec.parameters)

    def param(self, name: str) -> float:
        return dict(self.parameters)[name]

    @property
    def index(self) -> Optional[float]:
        """Stability index a of a stable subordinator (φ = λ^a), None otherwise"""
        if self.kind == 'stable':
            return 0.5 * self.param('alpha')
        if self.kind == 'geometric_stable':
            return 0.5 * self.param('beta')
        return None

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if self.kind == 'stable':
            return lam ** self.index
        if self.kind == 'relativistic':
            m = self.param('m')
            # √(λ+m²) - m without cancellation
            return lam / (np.sqrt(lam + m * m) + m) if m > 0 else np.sqrt(lam)
        if self.kind == 'geometric_stable':
            return np.log1p(lam ** self.index)
        if self.kind == 'gamma':
            return np.log1p(lam)
        # conjugate variance gamma
        with np.errstate(divide='ignore', invalid='ignore'):
            direct = lam / np.log1p(lam) - 1.0
        series = lam / 2.0 - lam ** 2 / 12.0 + lam ** 3 / 24.0
        return np.where(lam < 1e-4, series, direct)

    def derivative(self, lam, order: int = 1) -> np.ndarray:
        """
        φ^{(n)}(λ) for n = 1..4

        Analytic for stable, relativistic and gamma; first derivative analytic
        and higher orders by central differences of φ' in λ otherwise.
        """
        if not 1 <= order <= 4:
            raise ValueError(f"derivative order must be 1..4, got {order}")
        lam = np.asarray(lam, dtype=float)
        if self.kind == 'stable':
            a = self.index
            coeff = np.prod([a - k for k in range(order)])
            return coeff * lam ** (a - order)
        if self.kind == 'relativistic':
            m = self.param('m')
            coeff = np.prod([0.5 - k for k in range(order)])
            return coeff * (lam + m * m) ** (0.5 - order)
        if self.kind == 'gamma':
            sign = (-1.0) ** (order - 1)
            return sign * np.prod(np.arange(1, order)) / (1.0 + lam) ** order
        if order == 1:
            return self._first_derivative(lam)
        return _central_difference(self._first_derivative, lam, order - 1)

    def _first_derivative(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if self.kind == 'geometric_stable':
            b = self.index
            with np.errstate(divide='ignore'):
                return b * lam ** (b - 1.0) / (1.0 + lam ** b)
        with np.errstate(divide='ignore', invalid='ignore'):
            log = np.log1p(lam)
            direct = (log - lam / (1.0 + lam)) / (log * log)
        return np.where(lam < 1e-6, 0.5 - lam / 6.0 + lam ** 2 / 8.0, direct)

    def __str__(self) -> str:
        params = ", ".join(f"{k}={v:g}" for k, v in self.parameters)
        return f"φ[{self.kind}{', ' + params if params else ''}]"


def _central_difference(func: Callable, lam: np.ndarray, order: int, step: float = 0.02) -> np.ndarray:
    """n-th central difference of func with relative step, an O(step²) derivative"""
    h = step * lam
    total = np.zeros_like(lam, dtype=float)
    for j in range(order + 1):
        total += (-1.0) ** j * binom(order, j) * func(lam + (0.5 * order - j) * h)
    return total / h ** order


def laplace_exponent(spec: ProcessSpec) -> LaplaceExponent:
    return LaplaceExponent.for_spec(spec)


# ================================================
# CHARACTERISTIC EXPONENTS
# ================================================

@dataclass(frozen=True, eq=False)
class CharacteristicExponent:
    """
    ψ for a spec in dimension d

    closed_form: ψ(ξ) = |ξ|^α (stable); from_laplace: ψ(ξ) = φ(|ξ|²);
    from_levy_measure: radial Lévy-Khintchine quadrature, tabulated on an
    extended log grid and interpolated in log-log space between evaluations.
    """

    spec: ProcessSpec
    source: str
    d: int
    laplace: Optional[LaplaceExponent] = None
    table_points: int = 121

    def __post_init__(self):
        if self.source not in ('closed_form', 'from_laplace', 'from_levy_measure'):
            raise ValueError(f"unknown exponent source '{self.source}'")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @classmethod
    def for_spec(cls, spec: ProcessSpec, source: Optional[str] = None) -> 'CharacteristicExponent':
        source = source or spec.psi_source
        laplace = None
        if source == 'from_laplace':
            laplace = LaplaceExponent.for_spec(spec)
        elif source == 'closed_form' and spec.kind != 'stable':
            raise UnsupportedRouteError(f"no closed-form exponent for kind '{spec.kind}'")
        return cls(spec=spec, source=source, d=spec.dimension, laplace=laplace)

    @cached_property
    def levy(self):
        from modules.levy_measures import levy_density
        return levy_density(self.spec)

    def exact(self, R: float) -> float:
        """ψ(R) by direct evaluation (Lévy-Khintchine quadrature for that route)"""
        R = float(R)
        if R == 0.0:
            return 0.0
        if self.source == 'closed_form':
            return R ** self.spec.param('alpha')
        if self.source == 'from_laplace':
            return float(self.laplace(R * R))
        nu = self.levy
        return levy_khintchine_integral(nu, self.d, R, breakpoints=nu.breakpoints, support=nu.support)

    @cached_property
    def table(self) -> RadialProfile:
        """ψ tabulated on the spec grid widened by a decade at each end"""
        grid = np.geomspace(self.spec.r_min / 10.0, self.spec.r_max * 10.0, self.table_points)
        values = np.array([self.exact(R) for R in grid])
        logger.info(f"Tabulated ψ for {self.spec.label} by Lévy-Khintchine ({grid.size} points)")
        return RadialProfile(grid=grid, values=values, d=self.d, kind='exponent', spec_id=self.spec.label)

    def __call__(self, R) -> np.ndarray:
        R = np.asarray(R, dtype=float)
        if self.source == 'closed_form':
            return np.abs(R) ** self.spec.param('alpha')
        if self.source == 'from_laplace':
            return self.laplace(R * R)
        out = np.where(R > 0, self.table(np.where(R > 0, R, 1.0)), 0.0)
        return out if out.ndim else float(out)


@lru_cache(maxsize=64)
def exponent(spec: ProcessSpec, source: Optional[str] = None) -> CharacteristicExponent:
    """Shared exponent instance per (spec, source)"""
    return CharacteristicExponent.for_spec(spec, source)


def eval_psi(spec: ProcessSpec, R, source: Optional[str] = None):
    """
    ψ(R) for a spec

    Args:
        spec: Process spec
        R: Radius (scalar or array, >= 0)
        source: Force a route ('closed_form', 'from_laplace', 'from_levy_measure')

    Returns:
        ψ(R); scalars are evaluated without tabulation
    """
    psi = exponent(spec, source)
    if np.ndim(R) == 0:
        if R < 0:
            raise ValueError(f"R must be >= 0, got {R}")
        return psi.exact(R)
    return psi(R)


# ================================================
# SCALE FUNCTIONS
# ================================================

@dataclass(frozen=True, eq=False)
class ScaleFunctions:
    """
    ψ*, its generalized inverse ψ⁻ and L(r) = ψ*(1/r)^{-1/2}

    psi is any vectorized exponent; the table covers [r_min, r_max] in ξ.
    """

    psi: Callable
    r_min: float = config.GRID_R_MIN
    r_max: float = config.GRID_R_MAX
    points: int = config.GRID_POINTS
    refinement: int = config.PSI_STAR_REFINEMENT

    @classmethod
    def for_spec(cls, spec: ProcessSpec) -> 'ScaleFunctions':
        return _scale_functions(spec)

    @cached_property
    def grid(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.points)

    @cached_property
    def monotone(self) -> bool:
        """ψ nondecreasing on a 256-point scan of the table range"""
        scan = np.geomspace(self.r_min, self.r_max, config.MONOTONE_SCAN_POINTS)
        values = np.asarray(self.psi(scan), dtype=float)
        return bool(np.all(np.diff(values) >= -1e-12 * np.abs(values[1:])))

    @cached_property
    def _running_max(self) -> np.ndarray:
        fine = np.geomspace(self.r_min, self.r_max, (self.points - 1) * self.refinement + 1)
        values = np.asarray(self.psi(fine), dtype=float)
        head = float(np.max(self.psi(np.geomspace(self.r_min * 1e-6, self.r_min, 32))))
        running = np.maximum.accumulate(np.maximum(values, head))
        return running[::self.refinement]

    def psi_star(self, R) -> np.ndarray:
        """ψ*(R) = sup_{s ≤ R} ψ(s)"""
        R = np.asarray(R, dtype=float)
        if self.monotone:
            return np.where(R > 0, self.psi(np.maximum(R, 0.0)), 0.0)
        flat = np.atleast_1d(R)
        out = np.empty_like(flat)
        for i, value in enumerate(flat):
            out[i] = self._psi_star_scalar(float(value))
        return out.reshape(R.shape) if R.ndim else float(out[0])

    def _psi_star_scalar(self, R: float) -> float:
        if R <= 0:
            return 0.0
        grid = self.grid
        k = int(np.searchsorted(grid, R, side='right')) - 1
        base = float(self._running_max[k]) if k >= 0 else 0.0
        start = grid[k] if k >= 0 else R * 1e-6
        tail_points = self.refinement + 1 if k < grid.size - 1 else 16 * self.refinement
        dense = np.geomspace(start, R, max(tail_points, 2))
        return max(base, float(np.max(self.psi(dense))))

    def L(self, r) -> np.ndarray:
        """L(r) = ψ*(1/r)^{-1/2}"""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide='ignore'):
            return np.asarray(self.psi_star(1.0 / r), dtype=float) ** -0.5

    def psi_inverse(self, u) -> np.ndarray:
        """
        ψ⁻(u) = inf{s : ψ*(s) ≥ u}, right-continuous

        Raises:
            RangeError: u above sup ψ* on the table range
        """
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        out = np.array([self._inverse_scalar(float(v)) for v in flat])
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def _inverse_scalar(self, u: float) -> float:
        if u <= 0:
            raise ValueError(f"psi_inverse needs u > 0, got {u}")
        table = np.asarray(self.psi_star(self.grid), dtype=float)
        top = float(table[-1])
        if u > top:
            raise RangeError(f"u={u:g} exceeds sup ψ* = {top:g} on the tabulated range",
                             {'u': u, 'achievable_max': top})
        k = int(np.searchsorted(table, u, side='left'))
        hi = float(self.grid[k])
        lo = float(self.grid[k - 1]) if k > 0 else 0.0
        for _ in range(config.BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            if float(self.psi_star(mid)) >= u:
                hi = mid
            else:
                lo = mid
        return hi

    def invariants(self, grid: Optional[np.ndarray] = None) -> dict:
        """ψ ≤ ψ* ≤ π²ψ, L nondecreasing and L(2r) ≤ √10 L(r) on a grid"""
        xi = self.grid if grid is None else np.asarray(grid, dtype=float)
        psi = np.asarray(self.psi(xi), dtype=float)
        star = np.asarray(self.psi_star(xi), dtype=float)
        r = 1.0 / xi[::-1]
        L = self.L(r)
        L2 = self.L(2.0 * r[(2.0 * r) <= 1.0 / self.r_min])
        return {
            'psi_le_star': bool(np.all(psi <= star * (1 + 1e-12))),
            'star_le_pi2_psi': bool(np.all(star <= np.pi ** 2 * psi * (1 + 1e-12) + 1e-300)),
            'L_nondecreasing': bool(np.all(np.diff(L) >= -1e-12 * L[1:])),
            'L_doubling': bool(np.all(L2 <= np.sqrt(10.0) * L[:L2.size] * (1 + 1e-12))),
        }


@lru_cache(maxsize=64)
def _scale_functions(spec: ProcessSpec) -> ScaleFunctions:
    return ScaleFunctions(psi=exponent(spec), r_min=spec.r_min, r_max=spec.r_max, points=spec.points)


def psi_star(spec: ProcessSpec, R):
    return ScaleFunctions.for_spec(spec).psi_star(R)


def scale_L(spec: ProcessSpec, r):
    """L(r) for a spec; stable specs give r^{α/2}"""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("scale_L needs r > 0")
    return ScaleFunctions.for_spec(spec).L(r)


def psi_inverse(spec: ProcessSpec, u):
    return ScaleFunctions.for_spec(spec).psi_inverse(u)


# ================================================
# SCALING CONDITIONS
# ================================================

def _target_function(spec: ProcessSpec, target: str) -> Callable:
    if target == 'psi':
        return exponent(spec)
    if target == 'laplace':
        return laplace_exponent(spec)
    raise ValueError(f"target must be 'psi' or 'laplace', got '{target}'")


def _scaling_scan(f: Callable, exponent_value: float, theta0: float, lower: bool,
                  lam_decades: int) -> Tuple[float, tuple]:
    lam = np.geomspace(1.0, 10.0 ** lam_decades, lam_decades * _SCAN_PER_DECADE + 1)
    start = theta0 if theta0 > 0 else config.GRID_R_MIN
    theta = np.geomspace(start, max(config.GRID_R_MAX, start * 10.0), 6 * _SCAN_PER_DECADE + 1)
    L, T = np.meshgrid(lam, theta, indexing='ij')
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.asarray(f(L * T), dtype=float) / (L ** exponent_value * np.asarray(f(T), dtype=float))
    ratio = np.where(np.isfinite(ratio), ratio, np.inf if not lower else 0.0)
    idx = np.unravel_index(np.argmin(ratio) if lower else np.argmax(ratio), ratio.shape)
    return float(ratio[idx]), (float(L[idx]), float(T[idx]))


def _scaling_check(spec: ProcessSpec, condition: str, exponent_value: float, theta0: float,
                   target: str, tolerance: float) -> ScalingReport:
    if not 0 < exponent_value < 2:
        raise ValueError(f"scaling exponent must lie in (0, 2), got {exponent_value}")
    if theta0 < 0:
        raise ValueError("theta0 must be >= 0")
    f = _target_function(spec, target)
    lower = condition == 'WLSC'
    constant, witness = _scaling_scan(f, exponent_value, theta0, lower, _LAMBDA_DECADES)
    narrow, _ = _scaling_scan(f, exponent_value, theta0, lower, _LAMBDA_DECADES - 1)
    if lower:
        drift = narrow / constant if constant > 0 else float('inf')
        passed = constant > 0 and drift <= 1.0 + tolerance
    else:
        drift = constant / narrow if np.isfinite(constant) and narrow > 0 else float('inf')
        passed = bool(np.isfinite(constant)) and drift <= 1.0 + tolerance
    report = ScalingReport(condition=condition, exponent=exponent_value, theta0=theta0,
                           constant=constant, violation=float(drift), passed=bool(passed),
                           witness=witness, target=target, tolerance=tolerance, spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def check_wlsc(spec: ProcessSpec, alpha_low: float, theta0: float = 0.0, target: str = 'psi',
               tolerance: float = config.SCALING_TOLERANCE) -> ScalingReport:
    """
    Weak lower scaling f(λθ) ≥ C λ^α f(θ), λ ≥ 1, θ ≥ θ₀

    The constant is the smallest ratio on the grid; the check passes when it is
    positive and widening the λ range by a decade moves it by at most the
    tolerance.
    """
    return _scaling_check(spec, 'WLSC', alpha_low, theta0, target, tolerance)


def check_wusc(spec: ProcessSpec, alpha_high: float, theta0: float = 0.0, target: str = 'psi',
               tolerance: float = config.SCALING_TOLERANCE) -> ScalingReport:
    """Weak upper scaling f(λθ) ≤ C λ^α f(θ), λ ≥ 1, θ ≥ θ₀"""
    return _scaling_check(spec, 'WUSC', alpha_high, theta0, target, tolerance)


def check_H10_bernstein(spec: ProcessSpec, lam: Optional[np.ndarray] = None) -> HypothesisReport:
    """
    Spot check of the Bernstein sign pattern (-1)^{n-1} φ^{(n)} ≥ 0 for n = 1..4

    Only a numeric necessary condition of complete Bernstein, never a proof.
    """
    phi = laplace_exponent(spec)
    lam = np.geomspace(1e-2, 1e4, 61) if lam is None else np.asarray(lam, dtype=float)
    for order in range(1, 5):
        signed = (-1.0) ** (order - 1) * np.asarray(phi.derivative(lam, order), dtype=float)
        # relative to the local magnitude of the derivative
        relative = signed / (np.abs(phi.derivative(lam, 1)) * lam ** (1 - order) + 1e-300)
        i = int(np.argmin(relative))
        if relative[i] < -1e-6:
            return HypothesisReport(
                hypothesis='H10_bernstein_spot', passed=False,
                witness={'lambda': float(lam[i]), 'order': float(order), 'value': float(signed[i])},
                constant=None, grid=lam.tolist(), spec_id=spec.label,
                notes=f"sign pattern broken at derivative order {order}")
    return HypothesisReport(hypothesis='H10_bernstein_spot', passed=True, witness={},
                            constant=None, grid=lam.tolist(), spec_id=spec.label,
                            notes="numeric spot check of derivative signs up to order 4")
