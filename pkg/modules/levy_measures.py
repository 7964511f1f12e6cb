"""
Lévy measures
Closed-form and subordination-derived Lévy densities, and the checkers for
the hypotheses that are properties of ν or φ
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln

import config
from config import logger
from errors import ExtrapolationError, UnsupportedRouteError
from models.process import ProcessSpec
from models.profile import RadialProfile
from models.reports import BoundReport, HypothesisReport
from modules import symbols
from services.stable_ball import stable_constant
from utils.grids import fit_log_slope

# Radial range every ν checker scans
CHECK_R_MIN = 1e-4
CHECK_R_MAX = 1e2
CHECK_POINTS = 601

# Lévy densities of the subordinators that have one in closed form
SUBORDINATOR_DENSITIES = ('stable', 'relativistic', 'gamma')


def _log_subordinator_density(kind: str, param: float, t: np.ndarray) -> np.ndarray:
    """log ν_S(t)"""
    t = np.asarray(t, dtype=float)
    if kind == 'stable':
        a = param
        return np.log(a) - gammaln(1.0 - a) - (1.0 + a) * np.log(t)
    if kind == 'relativistic':
        return -0.5 * np.log(4.0 * np.pi) - 1.5 * np.log(t) - param * param * t
    if kind == 'gamma':
        return -np.log(t) - t
    raise UnsupportedRouteError(f"no closed-form subordinator density for '{kind}'")


def _subordinator_route(spec: ProcessSpec) -> Tuple[str, float]:
    """(ν_S kind, parameter) for specs whose subordinator density is explicit"""
    if spec.kind == 'stable':
        return 'stable', 0.5 * spec.param('alpha')
    if spec.kind == 'relativistic':
        return 'relativistic', spec.param('m')
    if spec.kind == 'geometric_stable' and spec.param('beta') == 2.0:
        return 'gamma', 0.0
    raise UnsupportedRouteError(
        f"no closed-form subordinator Lévy density for {spec.label}; use nu_small_time_limit",
        {'kind': spec.kind},
    )


@lru_cache(maxsize=100000)
def _subordinated_value(kind: str, param: float, d: int, r: float, order: int) -> float:
    """
    ∫ (4πt)^{-d/2} e^{-r²/4t} ν_S(t) dt (order 0) or its r-derivative (order 1)

    Integrated in u = log t around the saddle of the integrand, with the peak
    factored out so far tails do not underflow.
    """
    def log_integrand(u):
        t = np.exp(u)
        value = -0.5 * d * np.log(4.0 * np.pi * t) - r * r / (4.0 * t) + _log_subordinator_density(kind, param, t) + u
        if order == 1:
            value = value + np.log(r / (2.0 * t))
        return value

    scan = np.linspace(-80.0, 80.0, 1601)
    values = log_integrand(scan)
    peak_index = int(np.argmax(values))
    peak_u, peak = float(scan[peak_index]), float(values[peak_index])
    edges = [-np.inf, peak_u - 6.0, peak_u - 2.0, peak_u, peak_u + 2.0, peak_u + 6.0, np.inf]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(lambda u: np.exp(log_integrand(u) - peak), a, b,
                                limit=200, epsabs=1e-14, epsrel=1e-11)[0]
    value = total * np.exp(peak)
    return -value if order == 1 else value


# ================================================
# LÉVY DENSITIES
# ================================================

@dataclass(frozen=True, eq=False)
class LevyDensity:
    """
    Radial Lévy density ν(r) with its derivative

    forms: 'stable' (A_{d,α} r^{-d-α}); 'truncated_stable' (stable on (0,1],
    c₁e^{-c₂r} beyond, C¹ at 1); 'counterexample' (d = 1, stable on (0,1],
    A_α(1 - (r-1)^γ) on (1,2], zero beyond); 'subordinated' (Gaussian mixture
    against ν_S by quadrature); 'small_time' (lim p_t/t, tabulated, approximate).
    """

    form: str
    d: int
    parameters: Tuple[Tuple[str, float], ...] = ()
    spec_id: str = ''
    spec: Optional[ProcessSpec] = None

    def param(self, name: str) -> float:
        return dict(self.parameters)[name]

    @property
    def approximate(self) -> bool:
        return self.form == 'small_time'

    @property
    def support(self) -> float:
        return 2.0 if self.form == 'counterexample' else float('inf')

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        if self.form == 'truncated_stable':
            return (1.0,)
        if self.form == 'counterexample':
            return (1.0, 2.0)
        return ()

    @cached_property
    def constant(self) -> float:
        """A_{d,α} for the forms built on a stable density"""
        return stable_constant(self.d, self.param('alpha'))

    @cached_property
    def _small_time_table(self) -> RadialProfile:
        grid = np.geomspace(1e-2, 1e1, 31)
        values = np.array([nu_small_time_limit(self.spec, r)[0] for r in grid])
        logger.warning(f"{self.spec_id}: Lévy density from the small-time limit is approximate")
        return RadialProfile(grid=grid, values=np.maximum(values, 0.0), d=self.d, kind='levy_density',
                             approximate=True, spec_id=self.spec_id)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = self._evaluate(r, order=0)
        return float(out[0]) if scalar else out

    def derivative(self, r) -> np.ndarray:
        """ν'(r); analytic for closed forms, under the integral sign for subordinated ones"""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = self._evaluate(r, order=1)
        return float(out[0]) if scalar else out

    def _evaluate(self, r: np.ndarray, order: int) -> np.ndarray:
        d = self.d
        if self.form == 'stable':
            alpha = self.param('alpha')
            base = self.constant * r ** (-d - alpha)
            return base if order == 0 else -(d + alpha) * base / r
        if self.form == 'truncated_stable':
            alpha = self.param('alpha')
            c2 = d + alpha
            c1 = self.constant * np.exp(c2)
            inner = r <= 1.0
            with np.errstate(over='ignore'):
                near = self.constant * r ** (-d - alpha)
                far = c1 * np.exp(-c2 * r)
            if order == 0:
                return np.where(inner, near, far)
            return np.where(inner, -(d + alpha) * near / r, -c2 * far)
        if self.form == 'counterexample':
            alpha, gamma = self.param('alpha'), self.param('gamma')
            A = self.constant
            inner = r <= 1.0
            middle = (r > 1.0) & (r <= 2.0)
            with np.errstate(divide='ignore', invalid='ignore'):
                near = A * r ** (-1.0 - alpha)
                shifted = np.where(middle, r - 1.0, 1.0)
                if order == 0:
                    mid = A * (1.0 - shifted ** gamma)
                    return np.where(inner, near, np.where(middle, mid, 0.0))
                mid = -A * gamma * shifted ** (gamma - 1.0)
                return np.where(inner, -(1.0 + alpha) * near / r, np.where(middle, mid, 0.0))
        if self.form == 'subordinated':
            kind, param = _subordinator_route(self.spec)
            return np.array([_subordinated_value(kind, param, d, float(x), order) for x in r])
        if self.form == 'small_time':
            table = self._small_time_table
            if order == 0:
                return np.asarray(table(r), dtype=float)
            h = 1e-4 * r
            return (np.asarray(table(r + h)) - np.asarray(table(r - h))) / (2.0 * h)
        raise ValueError(f"unknown Lévy density form '{self.form}'")

    def profile(self, grid: Optional[np.ndarray] = None) -> RadialProfile:
        """Tabulate ν and ν' on a grid (the spec grid when none is given)"""
        if grid is None:
            grid = self.spec.grid if self.spec is not None else np.geomspace(CHECK_R_MIN, CHECK_R_MAX, 256)
        grid = np.asarray(grid, dtype=float)
        values = self(grid)
        monotone = bool(np.all(np.diff(values) <= 1e-12 * np.max(np.abs(values))))
        return RadialProfile(grid=grid, values=values, d=self.d, kind='levy_density',
                             monotone=monotone, origin_finite=False, derivative=self.derivative(grid),
                             approximate=self.approximate, spec_id=self.spec_id,
                             meta={'form': self.form, 'support': self.support,
                                   'breakpoints': list(self.breakpoints)})

    def __str__(self) -> str:
        return f"ν[{self.form}, d={self.d}{' (approximate)' if self.approximate else ''}]"


@lru_cache(maxsize=64)
def levy_density(spec: ProcessSpec) -> LevyDensity:
    """Lévy density of a spec, choosing the exact route when one exists"""
    if spec.kind in ('stable', 'truncated_stable', 'counterexample'):
        form = spec.kind
    else:
        try:
            _subordinator_route(spec)
            form = 'subordinated'
        except UnsupportedRouteError:
            form = 'small_time'
    return LevyDensity(form=form, d=spec.dimension, parameters=spec.parameters,
                       spec_id=spec.label, spec=spec)


def nu_from_subordinator(spec: ProcessSpec, d: Optional[int] = None, r=1.0):
    """
    ν(r) = ∫ (4πt)^{-d/2} exp(-r²/4t) ν_S(t) dt

    Args:
        spec: Subordinate spec with an explicit ν_S (stable, relativistic, gamma)
        d: Dimension (defaults to the spec's)
        r: Radius or array of radii

    Raises:
        UnsupportedRouteError: geometric stable with β < 2 and conjugate VG
    """
    kind, param = _subordinator_route(spec)
    d = spec.dimension if d is None else d
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.array([_subordinated_value(kind, param, d, float(x), 0) for x in r_arr])
    return float(out[0]) if np.ndim(r) == 0 else out


def nu_small_time_limit(spec: ProcessSpec, r: float, levels: int = 6,
                        t0: float = 0.125) -> Tuple[float, float]:
    """
    lim_{t→0} p_t(r)/t by Richardson extrapolation over t = t0·2^{-k}

    Returns:
        Tuple of (limit, estimated error band)

    Raises:
        ExtrapolationError: the last two extrapolants disagree; the tail is attached
    """
    from modules.transforms import density_at

    times = t0 * 2.0 ** -np.arange(levels)
    quotients = np.array([density_at(spec, float(t), r) / t for t in times])
    table = [quotients]
    for m in range(1, levels):
        prev = table[-1]
        factor = 2.0 ** m
        table.append((factor * prev[1:] - prev[:-1]) / (factor - 1.0))
    diagonal = np.array([column[-1] for column in table])
    value = float(diagonal[-1])
    error = float(abs(diagonal[-1] - diagonal[-2]))
    if error > 1e-3 * abs(value) + 1e-12:
        raise ExtrapolationError(
            f"small-time limit at r={r:g} did not settle (error {error:.3g})",
            {'tail': [float(v) for v in diagonal[-4:]], 'r': r},
        )
    logger.debug(f"{spec.label}: ν({r:g}) ≈ {value:.8g} ± {error:.2g} (small-time)")
    return value, error


# ================================================
# HYPOTHESIS CHECKS
# ================================================

def _check_grid(nu: LevyDensity) -> np.ndarray:
    grid = np.geomspace(CHECK_R_MIN, CHECK_R_MAX, CHECK_POINTS)
    extra = [b * (1.0 + s * 10.0 ** -k) for b in nu.breakpoints for s in (-1, 1) for k in range(2, 7)]
    grid = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float)]))
    return grid[~np.isin(grid, nu.breakpoints)]


def _tolerance(nu: LevyDensity, base: float) -> float:
    return base * config.APPROXIMATE_TOLERANCE_FACTOR if nu.approximate else base


def check_H1(spec: ProcessSpec) -> Tuple[HypothesisReport, HypothesisReport, HypothesisReport]:
    """
    (H1) as three grid checks

    1. ν nonincreasing and -ν'(r)/r nonincreasing on [1e-4, 1e2]
    2. shift ratio ν(r)/ν(r+1) over r ∈ [1, 100]
    3. doubling ratio ν(r)/ν(2r) over r ∈ (0, 1]

    Ratio reports carry a₁ = max ratio × headroom.
    """
    nu = levy_density(spec)
    grid = _check_grid(nu)
    values = nu(grid)
    slope = -nu.derivative(grid) / grid
    tol = _tolerance(nu, 1e-9)

    rises = np.diff(values) - tol * np.abs(values[:-1])
    slope_rises = np.diff(slope) - tol * np.abs(slope[:-1])
    worst_value = int(np.argmax(rises))
    worst_slope = int(np.argmax(slope_rises))
    value_ok = rises[worst_value] <= 0
    slope_ok = bool(np.all(np.isfinite(slope))) and slope_rises[worst_slope] <= 0
    if not value_ok:
        witness = {'r': float(grid[worst_value + 1]), 'increase': float(rises[worst_value])}
        note = "ν increases"
    elif not slope_ok:
        witness = {'r': float(grid[worst_slope + 1]), 'increase': float(slope_rises[worst_slope])}
        note = "-ν'(r)/r increases"
    else:
        witness = {'r': float(grid[worst_slope + 1]), 'increase': float(slope_rises[worst_slope])}
        note = ""
    monotone = HypothesisReport(hypothesis='H1_monotone', passed=bool(value_ok and slope_ok), witness=witness,
                                constant=None, grid=grid.tolist(), values=slope.tolist(),
                                spec_id=spec.label, approximate=nu.approximate, notes=note)

    shift = _ratio_report(nu, 'H1_ratio_a1', np.geomspace(1.0, 100.0, 199), lambda r: r + 1.0, spec)
    doubling = _ratio_report(nu, 'H1_doubling', np.geomspace(CHECK_R_MIN, 1.0, 201), lambda r: 2.0 * r, spec)

    for report in (monotone, shift, doubling):
        logger.info(f"{spec.label}: {report}")
    return monotone, shift, doubling


def _ratio_report(nu: LevyDensity, name: str, grid: np.ndarray, move, spec: ProcessSpec) -> HypothesisReport:
    num = nu(grid)
    den = nu(move(grid))
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(den > 0, num / den, np.where(num > 0, np.inf, 1.0))
    i = int(np.argmax(ratio))
    top = float(ratio[i])
    passed = bool(np.isfinite(top))
    return HypothesisReport(hypothesis=name, passed=passed, witness={'r': float(grid[i]), 'ratio': top},
                            constant=top * config.CONSTANT_HEADROOM if passed else float('inf'),
                            grid=grid.tolist(), values=ratio.tolist(), spec_id=spec.label,
                            approximate=nu.approximate)


def h1_constant(reports: Sequence[HypothesisReport]) -> float:
    """a₁ from the ratio reports of check_H1"""
    return max(r.constant for r in reports if r.constant is not None)


def check_H8(spec: ProcessSpec) -> HypothesisReport:
    """(H8) ν(r) ≤ a₁ν(r+1) for r ≥ 1"""
    nu = levy_density(spec)
    report = _ratio_report(nu, 'H8_nu_shift', np.geomspace(1.0, 100.0, 199), lambda r: r + 1.0, spec)
    report.hypothesis = 'H8_nu_shift'
    return report


def check_H6(spec: ProcessSpec) -> HypothesisReport:
    """(H6) ν_S infinite with a decreasing density (explicit ν_S only)"""
    kind, param = _subordinator_route(spec)
    t = np.geomspace(1e-8, 1e4, 241)
    density = np.exp(_log_subordinator_density(kind, param, t))
    rises = np.diff(density)
    i = int(np.argmax(rises))
    # infinite mass: ∫ ν_S near 0 diverges when t ν_S(t) does not vanish
    infinite = bool(t[0] * density[0] > t[10] * density[10] * 0.5)
    passed = bool(rises[i] <= 0 and infinite)
    return HypothesisReport(hypothesis='H6_subordinator_density', passed=passed,
                            witness={'t': float(t[i + 1]), 'increase': float(rises[i])}, constant=None,
                            spec_id=spec.label, notes=f"ν_S of kind {kind}")


def check_H9(spec: ProcessSpec) -> HypothesisReport:
    return HypothesisReport(hypothesis='H9_dimension', passed=spec.dimension >= 3,
                            witness={'d': float(spec.dimension)}, constant=None, spec_id=spec.label)


def check_H7_phi_prime(spec: ProcessSpec, delta: Optional[float] = None, theta0: float = 1.0,
                       tolerance: float = config.SCALING_TOLERANCE) -> HypothesisReport:
    """
    (H7) φ'(λθ)/φ'(θ) ≤ C̄ λ^{-δ} for λ ≥ 1, θ ≥ θ₀

    With delta=None the largest δ ∈ (0, 1] on a 0.01 grid that passes is fitted.
    """
    phi = symbols.laplace_exponent(spec)
    if delta is None:
        for candidate in np.round(np.arange(1.0, 0.0, -0.01), 2):
            report = check_H7_phi_prime(spec, float(candidate), theta0, tolerance)
            if report.passed:
                report.notes = f"fitted delta={candidate:.2f}"
                return report
        return HypothesisReport(hypothesis='H7_phi_prime_scaling', passed=False, witness={},
                                constant=float('inf'), spec_id=spec.label, notes="no delta in (0, 1] passes")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")

    def scan(decades: int):
        lam = np.geomspace(1.0, 10.0 ** decades, decades * 10 + 1)
        start = theta0 if theta0 > 0 else config.GRID_R_MIN
        theta = np.geomspace(start, start * 1e6, 61)
        L, T = np.meshgrid(lam, theta, indexing='ij')
        ratio = phi.derivative(L * T) * L ** delta / phi.derivative(T)
        idx = np.unravel_index(np.argmax(ratio), ratio.shape)
        return float(ratio[idx]), float(L[idx]), float(T[idx])

    constant, lam_w, theta_w = scan(6)
    narrow, _, _ = scan(5)
    drift = constant / narrow if narrow > 0 else float('inf')
    passed = bool(np.isfinite(constant) and drift <= 1.0 + tolerance)
    return HypothesisReport(hypothesis='H7_phi_prime_scaling', passed=passed,
                            witness={'lambda': lam_w, 'theta': theta_w, 'delta': float(delta), 'drift': drift},
                            constant=constant, spec_id=spec.label)


def classify_assumptions(spec: ProcessSpec, theta0: float = 1.0,
                         candidates: Iterable[float] = (1.9, 1.5, 1.0, 0.5, 0.25, 0.1)) -> Dict[str, object]:
    """
    Which assumption routes hold numerically

    A1 = H0 + H1 + H3 (WLSC of ψ); A2 = H4 + H5 + H6 + H7 + H8 + H9;
    A3 = H4 + H7 + H10. H2 and H5 are recorded as assumed.
    """
    result: Dict[str, object] = {'spec_id': spec.label, 'H0': True, 'H2': 'assumed', 'H5': 'assumed'}
    nu = levy_density(spec)
    if nu.approximate:
        result['H1'] = None
    else:
        result['H1'] = all(r.passed for r in check_H1(spec))

    h3 = None
    for alpha_low in candidates:
        if symbols.check_wlsc(spec, alpha_low, theta0).passed:
            h3 = alpha_low
            break
    result['H3'] = h3 is not None
    result['H3_alpha'] = h3

    result['H4'] = spec.is_subordinate
    result['H9'] = check_H9(spec).passed
    if spec.is_subordinate:
        h7 = check_H7_phi_prime(spec, None, theta0)
        result['H7'] = h7.passed
        result['H10'] = h10 = symbols.check_H10_bernstein(spec).passed
        try:
            result['H6'] = check_H6(spec).passed
        except UnsupportedRouteError:
            result['H6'] = None
        result['H8'] = None if nu.approximate else check_H8(spec).passed
    else:
        h10 = False
        result.update({'H6': False, 'H7': False, 'H8': None if nu.approximate else check_H8(spec).passed,
                       'H10': False})

    result['A1'] = bool(result['H1']) and bool(result['H3'])
    result['A2'] = bool(result['H4'] and result['H6'] and result['H7'] and result['H8'] and result['H9'])
    result['A3'] = bool(result['H4'] and result['H7'] and h10)
    result['A'] = result['A1'] or result['A2'] or result['A3']
    logger.info(f"{spec.label}: A1={result['A1']} A2={result['A2']} A3={result['A3']}")
    return result


# ================================================
# BOUND REPORTS
# ================================================

def levy_quotient_bounds(spec: ProcessSpec, a1: float, points: int = 121) -> BoundReport:
    """
    Quotient bounds implied by (H1), merged into one fixed-constant report

    |ν'/ν| ≤ 3(a₁-1)/(r∧1); ν(r₁)/ν(r₂) ≤ (r₂/r₁)^{3(a₁-1)} e^{3(a₁-1)(r₂-r₁)};
    ν(r₁) - ν(r₂) ≤ (3/2)(a₁-1) ν(r₁)/(1∧r₁) (r₂-r₁)(1 + r₂/r₁)
    """
    nu = levy_density(spec)
    k = 3.0 * (a1 - 1.0)
    tolerance = _tolerance(nu, 1e-6)

    r = np.geomspace(CHECK_R_MIN, CHECK_R_MAX, points * 2)
    values = nu(r)
    live = values > 0
    r, values = r[live], values[live]
    derivative_part = BoundReport(
        name='log_derivative', points=[{'r': float(x)} for x in r],
        lhs=np.abs(nu.derivative(r) / values), rhs=k / np.minimum(r, 1.0),
        fit_mode='fixed_constant', tolerance=tolerance)

    grid = np.geomspace(CHECK_R_MIN, CHECK_R_MAX, points)
    r1, r2 = np.meshgrid(grid, grid, indexing='ij')
    upper = r1 < r2
    r1, r2 = r1[upper], r2[upper]
    v1, v2 = nu(r1), nu(r2)
    live = v2 > 0
    r1, r2, v1, v2 = r1[live], r2[live], v1[live], v2[live]
    # compared in log space: ratio = exp(log lhs - log rhs)
    log_excess = np.log(v1) - np.log(v2) - k * (np.log(r2 / r1) + (r2 - r1))
    pair_points = [{'r1': float(a), 'r2': float(b)} for a, b in zip(r1, r2)]
    ratio_part = BoundReport(name='ratio', points=pair_points, lhs=np.exp(np.minimum(log_excess, 700.0)),
                             rhs=np.ones_like(log_excess), fit_mode='fixed_constant', tolerance=tolerance)
    difference_part = BoundReport(
        name='difference', points=pair_points, lhs=v1 - v2,
        rhs=0.5 * k * v1 / np.minimum(1.0, r1) * (r2 - r1) * (1.0 + r2 / r1),
        fit_mode='fixed_constant', tolerance=tolerance)

    report = BoundReport.merge('levy_quotient', [derivative_part, ratio_part, difference_part],
                               spec_id=spec.label)
    report.details['a1'] = a1
    logger.info(f"{spec.label}: {report}")
    return report


def check_tilde_nu_bound(spec: ProcessSpec, a1: float, pairs: Sequence[Tuple[Sequence[float], Sequence[float]]]) -> BoundReport:
    """
    ν̃(v, z) ≤ (3/2)(a₁-1)|z-ẑ| ν(v-z)/(1∧|v-z|) (1 + |v-ẑ|/|v-z|) on sampled pairs
    """
    from modules.difference import tilde_nu

    nu = levy_density(spec)
    lhs, rhs, points = [], [], []
    for v, z in pairs:
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        z_hat = z.copy()
        z_hat[0] = -z_hat[0]
        dist = float(np.linalg.norm(v - z))
        lhs.append(tilde_nu(spec, v, z))
        rhs.append(1.5 * (a1 - 1.0) * float(np.linalg.norm(z - z_hat)) * nu(dist) / min(1.0, dist)
                   * (1.0 + float(np.linalg.norm(v - z_hat)) / dist))
        points.append({'v1': float(v[0]), 'z1': float(z[0]), 'dist': dist})
    return BoundReport(name='tilde_nu_bound', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                       fit_mode='fixed_constant', tolerance=_tolerance(nu, 1e-6), spec_id=spec.label)


def levy_upper_bound_report(spec: ProcessSpec, grid: Optional[np.ndarray] = None) -> BoundReport:
    """ν(r) ≤ c / (L²(r) r^d) with c fitted"""
    nu = levy_density(spec)
    r = np.geomspace(CHECK_R_MIN, CHECK_R_MAX, 241) if grid is None else np.asarray(grid, dtype=float)
    L = symbols.scale_L(spec, r)
    report = BoundReport(name='levy_upper', points=[{'r': float(x)} for x in r], lhs=nu(r),
                         rhs=1.0 / (L * L * r ** spec.dimension), fit_mode='fit_constant',
                         spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def levy_limit_report(spec: ProcessSpec) -> HypothesisReport:
    """r^{d+2}ν(r) → 0 as r → 0 and r^d ν(r) → 0 as r → ∞ (trend over the end decades)"""
    nu = levy_density(spec)
    d = spec.dimension
    small = np.geomspace(CHECK_R_MIN, 10.0 * CHECK_R_MIN, 21)
    large = np.geomspace(CHECK_R_MAX / 10.0, CHECK_R_MAX, 21)
    head = small ** (d + 2) * nu(small)
    tail = large ** d * nu(large)
    head_slope, _ = fit_log_slope(small, head)
    tail_slope = fit_log_slope(large, tail)[0] if np.all(tail > 0) else -np.inf
    passed = bool(head_slope > 0 and (tail_slope < 0 or np.all(tail == 0)))
    return HypothesisReport(hypothesis='levy_limits', passed=passed,
                            witness={'head_slope': head_slope, 'tail_slope': float(tail_slope)},
                            constant=None, spec_id=spec.label, approximate=nu.approximate)
