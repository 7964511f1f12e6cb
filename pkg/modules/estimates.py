"""
Estimates
Bound-verification harness: derivative bounds on p_t, gradient bounds for
harmonic and Green functions, the reflection Lipschitz bound and the
non-differentiable counterexample
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from config import logger
from errors import PreconditionError, RegimeEmptyError, UnsupportedRouteError
from models.process import Ball, ProcessSpec
from models.profile import RadialProfile
from models.reports import BoundReport, CounterexampleReport
from models.samples import PathConfig, reflect
from modules import sampling, symbols
from modules.levy_measures import levy_density
from modules.transforms import (cached_transition_density, density_upper_bound_report, dimension_walk,
                                transition_density, truncated_potential)
from services import stable_ball
from utils.grids import fit_log_slope
from utils.validators import validate_counterexample_triple

# Re-exported for the bounds suite
density_bounds = density_upper_bound_report

# Regime grids smaller than this are logged as thin
MIN_REGIME_POINTS = 100

Box = Tuple[Sequence[float], Sequence[float]]
Grid = Dict[str, np.ndarray]


# ================================================
# HARNESS
# ================================================

@dataclass(frozen=True)
class BoundSpec:
    """
    One inequality lhs ≤ c·rhs, evaluated on the part of a grid inside a regime

    lhs, rhs and regime take a dict of equal-length coordinate arrays.
    """

    name: str
    lhs: Callable[[Grid], np.ndarray]
    rhs: Callable[[Grid], np.ndarray]
    regime: Optional[Callable[[Grid], np.ndarray]] = None
    regime_label: str = 'all points'
    fit_mode: str = 'fit_constant'
    tolerance: float = 0.10


def product_grid(**axes: Sequence[float]) -> Grid:
    """Flattened Cartesian product of named axes"""
    names = list(axes)
    mesh = np.meshgrid(*[np.asarray(axes[n], dtype=float) for n in names], indexing='ij')
    return {n: m.reshape(-1) for n, m in zip(names, mesh)}


def evaluate_bound(bound: BoundSpec, grid: Grid, spec_id: str = '') -> BoundReport:
    """
    Evaluate a BoundSpec on the regime part of a grid

    Raises:
        RegimeEmptyError: the regime keeps no grid point
        PreconditionError: rhs is not positive somewhere on the regime
    """
    size = len(next(iter(grid.values())))
    mask = np.ones(size, dtype=bool) if bound.regime is None else np.asarray(bound.regime(grid), dtype=bool)
    kept = int(mask.sum())
    if kept == 0:
        raise RegimeEmptyError(f"{bound.name}: regime '{bound.regime_label}' leaves no grid point",
                               {'grid_points': size})
    sub = {k: v[mask] for k, v in grid.items()}
    lhs = np.asarray(bound.lhs(sub), dtype=float)
    rhs = np.asarray(bound.rhs(sub), dtype=float)
    if np.any(rhs <= 0):
        raise PreconditionError(f"{bound.name}: right-hand side not positive on the regime")
    if kept < MIN_REGIME_POINTS:
        logger.warning(f"{bound.name}: regime '{bound.regime_label}' keeps only {kept} points")
    logger.info(f"{bound.name}: regime '{bound.regime_label}' keeps {kept} of {size} points")
    points = [{k: float(v) for k, v in zip(sub, values)} for values in zip(*sub.values())]
    return BoundReport(name=bound.name, points=points, lhs=lhs, rhs=rhs, fit_mode=bound.fit_mode,
                       tolerance=bound.tolerance, spec_id=spec_id, excluded=size - kept,
                       details={'regime': bound.regime_label, 'regime_points': kept})


def refinement_stability(build: Callable[[int], Union[BoundReport, Sequence[Optional[BoundReport]]]],
                         points: int = 100):
    """
    Build reports on `points` and on the nested ×2 grid; fail those whose constant drifts

    build may return one report or a tuple of reports (None entries are skipped).
    """
    base = build(points)
    refined = build(2 * points - 1)
    pairs = zip(base, refined) if isinstance(base, (tuple, list)) else [(base, refined)]
    for coarse, fine in pairs:
        if coarse is None:
            continue
        stable = coarse.require_stable(fine)
        logger.info(f"{coarse.name}: constant {coarse.constant:.4g} -> {fine.constant:.4g} "
                    f"({'stable' if stable else 'drifts'})")
    return base


# ================================================
# DERIVATIVES OF p_t
# ================================================

@lru_cache(maxsize=16)
def _unit_walk(spec: ProcessSpec) -> RadialProfile:
    """p^{(d+2)}_1 from the dimension walk of p_1"""
    return dimension_walk(transition_density(spec, 1.0))


def density_gradient(spec: ProcessSpec, t, r) -> np.ndarray:
    """
    |d/dr p_t(r)| = 2πr p^{(d+2)}_t(r)

    Cauchy by its closed form; other stable specs by scaling p^{(d+2)}_1;
    anything else by walking the tabulated p_t for each distinct t.
    """
    t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
    d = spec.dimension
    if spec.is_cauchy:
        return (d + 1) * r / (t * t + r * r) * stable_ball.cauchy_density(d, t, r)
    alpha = spec.stability_index
    if alpha is not None:
        walk = _unit_walk(spec)
        scaled = t ** (-(d + 2) / alpha) * walk(r * t ** (-1.0 / alpha))
        return 2.0 * np.pi * r * scaled
    out = np.empty(r.shape)
    for tv in np.unique(t):
        sel = t == tv
        walk = dimension_walk(cached_transition_density(spec, float(tv)))
        out[sel] = 2.0 * np.pi * r[sel] * walk(r[sel])
    return out


def check_grad_pt(spec: ProcessSpec, t_grid: Optional[Sequence[float]] = None,
                  r_grid: Optional[Sequence[float]] = None, theta0: float = 0.0,
                  r0: Optional[float] = None) -> Tuple[BoundReport, BoundReport, Optional[BoundReport]]:
    """
    The three derivative bounds on p_t over a (t, r) grid

    (i)   |p'_t(r)| ≤ c (1 ∧ tψ*(1/r)) / r^{d+1}
    (ii)  |p'_t(r)| ≤ c r ([ψ⁻(1/t)]^{d+2} ∧ tψ*(1/r)/r^{d+2})  where tψ*(θ₀) ≤ 1/π²
    (iii) |p'_t(r)| ≥ c* r (same minimum)  where tψ*(θ₀/r₀) ≤ 1 and r < r₀/θ₀

    Args:
        theta0: Scaling threshold (0 for global scaling)
        r0: Lower-bound radius; (iii) runs for stable specs, or for others when r0 is given

    Returns:
        (upper (i), upper (ii), lower (iii) as fitted 1/c*, or None when skipped)
    """
    t_grid = np.geomspace(1e-2, 1e2, 100) if t_grid is None else np.asarray(t_grid, dtype=float)
    r_grid = np.geomspace(1e-2, 1e2, 100) if r_grid is None else np.asarray(r_grid, dtype=float)
    grid = product_grid(t=t_grid, r=r_grid)
    d = spec.dimension

    def gradient(g):
        return density_gradient(spec, g['t'], g['r'])

    def small_time(g):
        return g['t'] * symbols.psi_star(spec, 1.0 / g['r'])

    def profile_min(g):
        inverse = symbols.psi_inverse(spec, 1.0 / g['t'])
        return g['r'] * np.minimum(inverse ** (d + 2), small_time(g) / g['r'] ** (d + 2))

    star_theta = float(symbols.psi_star(spec, theta0)) if theta0 > 0 else 0.0
    first = BoundSpec('grad_pt_i', gradient, lambda g: np.minimum(1.0, small_time(g)) / g['r'] ** (d + 1))
    second = BoundSpec('grad_pt_ii', gradient, profile_min,
                       regime=lambda g: g['t'] * star_theta <= 1.0 / np.pi ** 2,
                       regime_label='t psi*(theta0) <= 1/pi^2')
    reports: List[Optional[BoundReport]] = [evaluate_bound(first, grid, spec.label),
                                            evaluate_bound(second, grid, spec.label)]

    if spec.stability_index is None and r0 is None:
        logger.info(f"{spec.label}: lower derivative bound skipped (needs global scaling or r0)")
        reports.append(None)
    else:
        if theta0 > 0 and r0 is None:
            raise PreconditionError("lower derivative bound with theta0 > 0 needs r0")
        star_lower = float(symbols.psi_star(spec, theta0 / r0)) if theta0 > 0 else 0.0
        r_cap = r0 / theta0 if theta0 > 0 else np.inf
        third = BoundSpec('grad_pt_iii', profile_min, gradient,
                          regime=lambda g: (g['t'] * star_lower <= 1.0) & (g['r'] < r_cap),
                          regime_label='t psi*(theta0/r0) <= 1, r < r0/theta0')
        reports.append(evaluate_bound(third, grid, spec.label))
    for report in reports:
        if report is not None:
            logger.info(f"{spec.label}: {report}")
    return reports[0], reports[1], reports[2]


# ================================================
# HARMONIC GRADIENTS
# ================================================

@dataclass(frozen=True)
class ClosedFormHarmonic:
    """x ↦ P^x(X(τ_B) ∈ A) for a stable process, a ball and a box A (d ≤ 2)"""

    alpha: float
    ball: Ball
    box: Box

    def _shift(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float).reshape(-1) - np.asarray(self.ball.center)

    def value(self, x) -> Tuple[float, float]:
        center = np.asarray(self.ball.center)
        lower = np.asarray(self.box[0], dtype=float) - center
        upper = np.asarray(self.box[1], dtype=float) - center
        return stable_ball.harmonic_measure_box(self.alpha, self.ball.dimension, self.ball.radius,
                                                self._shift(x), lower, upper), 0.0

    def difference(self, x, y) -> Tuple[float, float]:
        return self.value(x)[0] - self.value(y)[0], 0.0


@dataclass(frozen=True, eq=False)
class MonteCarloHarmonic:
    """x ↦ E^x f(X(τ_B)); differences pair paths through shared streams"""

    spec: ProcessSpec
    ball: Ball
    boundary_f: Callable[[np.ndarray], np.ndarray]
    cfg: PathConfig = PathConfig()

    def value(self, x) -> Tuple[float, float]:
        estimate = sampling.harmonic_eval(self.spec, self.ball, self.boundary_f, x, self.cfg,
                                          check_mean_value=False)
        return estimate.value, estimate.stderr

    def difference(self, x, y) -> Tuple[float, float]:
        first = sampling.sample_exit(self.spec, self.ball, x, self.cfg)
        second = sampling.sample_exit(self.spec, self.ball, y, self.cfg)
        both = first.exited & second.exited
        terms = (np.asarray(self.boundary_f(first.x_exit[both]), dtype=float)
                 - np.asarray(self.boundary_f(second.x_exit[both]), dtype=float))
        if terms.size < 2:
            return float('nan'), float('inf')
        return float(terms.mean()), float(terms.std(ddof=1) / np.sqrt(terms.size))


HarmonicEvaluator = Union[ClosedFormHarmonic, MonteCarloHarmonic]


@dataclass(frozen=True)
class GradientProbe:
    """Finite-difference probe of a harmonic function at an interior point"""

    f: HarmonicEvaluator
    x: Tuple[float, ...]
    delta_D: float
    h: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.delta_D <= 0:
            raise PreconditionError(f"probe point must be interior, δ = {self.delta_D}")
        if not self.h:
            object.__setattr__(self, 'h', (self.delta_D / 8.0, self.delta_D / 16.0, self.delta_D / 32.0))
        if any(b >= a for a, b in zip(self.h, self.h[1:])):
            raise PreconditionError("step schedule must be strictly decreasing")
        if max(self.h) >= self.delta_D / 4.0:
            raise PreconditionError("every step must be below δ/4")


def radial_probes(f: HarmonicEvaluator, ball: Ball, deltas: Sequence[float],
                  direction: Optional[Sequence[float]] = None) -> List[GradientProbe]:
    """Probes at distance δ from the boundary along a radius"""
    d = ball.dimension
    unit = np.zeros(d)
    unit[0] = 1.0
    if direction is not None:
        unit = np.asarray(direction, dtype=float) / np.linalg.norm(direction)
    center = np.asarray(ball.center)
    return [GradientProbe(f=f, x=tuple(center + (ball.radius - delta) * unit), delta_D=float(delta))
            for delta in deltas]


def probe_gradient(probe: GradientProbe) -> Dict[str, object]:
    """
    Central differences with Richardson extrapolation over the step schedule

    Returns:
        dict with 'gradient' (vector), 'noise' (MC standard error of the finest
        difference quotient), 'truncation' (change of the last Richardson step)
        and 'inconclusive' (signal/noise below 3)
    """
    x = np.asarray(probe.x, dtype=float)
    d = x.size
    gradient = np.zeros(d)
    noise = np.zeros(d)
    truncation = np.zeros(d)
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        quotients, errors = [], []
        for h in probe.h:
            diff, err = probe.f.difference(x + h * e, x - h * e)
            quotients.append(diff / (2.0 * h))
            errors.append(err / (2.0 * h))
        extrapolated = [(4.0 * b - a) / 3.0 for a, b in zip(quotients, quotients[1:])]
        gradient[k] = extrapolated[-1] if extrapolated else quotients[-1]
        truncation[k] = abs(extrapolated[-1] - extrapolated[-2]) if len(extrapolated) > 1 else 0.0
        noise[k] = errors[-1] * (4.0 / 3.0 if extrapolated else 1.0)
    magnitude = float(np.linalg.norm(gradient))
    noise_norm = float(np.linalg.norm(noise))
    return {'gradient': gradient, 'noise': noise_norm, 'truncation': float(np.linalg.norm(truncation)),
            'inconclusive': bool(noise_norm > 0 and magnitude < 3.0 * noise_norm)}


def richardson_order(func: Callable[[float], float], x: float, steps: Sequence[float]) -> float:
    """
    Observed order of the central difference: slope of log|D(h) - D*| against log h

    D* is the Richardson extrapolation of the two finest steps.
    """
    steps = np.asarray(steps, dtype=float)
    quotients = np.array([(func(x + h) - func(x - h)) / (2.0 * h) for h in steps])
    reference = (4.0 * quotients[-1] - quotients[-2]) / 3.0
    errors = np.abs(quotients[:-1] - reference)
    slope, _ = fit_log_slope(steps[:-1], errors)
    return float(slope)


def _trend_slope(deltas: np.ndarray, ratios: np.ndarray) -> float:
    """Slope of log ratio against log δ over the smallest decade of δ"""
    keep = (deltas <= 10.0 * deltas.min()) & (ratios > 0)
    if keep.sum() < 2:
        return float('nan')
    slope, _ = fit_log_slope(deltas[keep], ratios[keep])
    return float(slope)


def harmonic_evaluator(spec: ProcessSpec, ball: Ball, boundary: Union[Box, Callable],
                       cfg: PathConfig = PathConfig(), method: str = 'auto') -> HarmonicEvaluator:
    """Closed-form kernel for stable specs with box data in d ≤ 2, Monte Carlo otherwise"""
    closed = (spec.stability_index is not None and ball.dimension <= 2 and not callable(boundary)
              and not ball.is_annulus)
    if method == 'closed_form' or (method == 'auto' and closed):
        if not closed:
            raise UnsupportedRouteError(f"no closed-form harmonic kernel for {spec.label}")
        return ClosedFormHarmonic(alpha=spec.stability_index, ball=ball, box=boundary)
    boundary_f = boundary if callable(boundary) else sampling.box_indicator(*boundary)
    return MonteCarloHarmonic(spec=spec, ball=ball, boundary_f=boundary_f, cfg=cfg)


def check_harmonic_gradient(spec: ProcessSpec, ball: Ball, boundary: Union[Box, Callable],
                            probes: Optional[Sequence[GradientProbe]] = None,
                            deltas: Sequence[float] = (0.4, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02),
                            cfg: PathConfig = PathConfig(), method: str = 'auto',
                            trend_tolerance: float = 0.15) -> BoundReport:
    """
    |∇f(x)| ≤ c f(x) / (δ_D(x) ∧ 1) for f(x) = E^x f(X(τ_B)) with nonnegative data

    Args:
        boundary: A box (lower, upper) for indicator data, or a vectorized callable
        probes: Explicit probes; default radial probes at the given deltas

    Returns:
        Fitted-constant report; inconclusive probes are excluded and counted,
        details['trend_slope'] holds the log-ratio slope over the smallest decade of δ
    """
    evaluator = harmonic_evaluator(spec, ball, boundary, cfg, method)
    probes = list(probes) if probes is not None else radial_probes(evaluator, ball, deltas)
    lhs, rhs, points = [], [], []
    excluded = 0
    for probe in probes:
        result = probe_gradient(probe)
        if result['inconclusive']:
            excluded += 1
            logger.info(f"{spec.label}: probe at δ={probe.delta_D:g} inconclusive (MC noise)")
            continue
        value, stderr = probe.f.value(probe.x)
        if value <= 0:
            raise PreconditionError(f"harmonic function must be positive at probes, f({probe.x}) = {value:g}")
        lhs.append(float(np.linalg.norm(result['gradient'])))
        rhs.append(value / min(probe.delta_D, 1.0))
        points.append({'delta': probe.delta_D, 'f': value, 'f_stderr': stderr, 'noise': result['noise'],
                       'truncation': result['truncation']})
    report = BoundReport(name='harmonic_gradient', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label, excluded=excluded)
    deltas_kept = np.array([p['delta'] for p in points])
    if deltas_kept.size:
        slope = _trend_slope(deltas_kept, report.ratios)
        report.details['trend_slope'] = slope
        if np.isfinite(slope) and abs(slope) > trend_tolerance:
            logger.warning(f"{spec.label}: gradient ratio trends with slope {slope:.3f} as δ shrinks")
            report.passed = False
    logger.info(f"{spec.label}: {report}")
    return report


# ================================================
# GREEN GRADIENTS AND REFLECTION
# ================================================

def check_green_gradient(spec: ProcessSpec, radius: float = 1.0,
                         pairs: Optional[Sequence[Tuple[float, float]]] = None,
                         h: float = 1e-3, band: float = 0.05) -> BoundReport:
    """
    |∂ₓG_B(x, y)| ≤ c G_B(x, y) / (δ(x) ∧ |x - y| ∧ 1) on an interval B = (-r, r)

    Pairs closer than max(band, 4h) or with δ(x) < 4h are excluded and counted.
    """
    alpha = spec.stability_index
    if spec.dimension != 1 or alpha is None:
        raise UnsupportedRouteError("Green-gradient check needs the closed-form interval Green function")
    if pairs is None:
        axis = np.linspace(-0.95 * radius, 0.95 * radius, 20)
        pairs = [(x, y) for x in axis for y in axis]

    def green(x, y):
        return stable_ball.green_function(alpha, 1, radius, np.atleast_1d(x), np.atleast_1d(y))

    lhs, rhs, points = [], [], []
    excluded = 0
    steps = (h, h / 2.0, h / 4.0)
    for x, y in pairs:
        delta = radius - abs(x)
        if abs(x - y) < max(band, 4.0 * h) or delta < 4.0 * h:
            excluded += 1
            continue
        quotients = [(float(green(x + s, y)) - float(green(x - s, y))) / (2.0 * s) for s in steps]
        derivative = (4.0 * quotients[-1] - quotients[-2]) / 3.0
        value = float(green(x, y))
        lhs.append(abs(derivative))
        rhs.append(value / min(delta, abs(x - y), 1.0))
        points.append({'x': float(x), 'y': float(y), 'derivative': derivative})
    report = BoundReport(name='green_gradient', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label, excluded=excluded)
    logger.info(f"{spec.label}: {report}")
    return report


def _box_distance(box: Box) -> float:
    lower = np.asarray(box[0], dtype=float)
    upper = np.asarray(box[1], dtype=float)
    return float(np.linalg.norm(np.clip(0.0, lower, upper)))


def check_lipschitz_reflection(spec: ProcessSpec, r: float = 0.2, h_grid: Optional[Sequence[float]] = None,
                               boundary: Box = ((2.0,), (3.0,)), cfg: PathConfig = PathConfig(),
                               method: str = 'auto') -> BoundReport:
    """
    f(h e₁) - f(-h e₁) ≤ c h f(0) / r for f harmonic in B(0, 4r) with data in a box outside it

    Args:
        r: Radius in (0, 1/4)
        h_grid: Steps in (0, r/16)
        boundary: Box carrying the indicator data, at distance > 4r from 0
    """
    d = spec.dimension
    if not 0 < r < 0.25:
        raise PreconditionError("r must lie in (0, 1/4)")
    h_grid = np.geomspace(r / 1000.0, r / 20.0, 8) if h_grid is None else np.asarray(h_grid, dtype=float)
    if np.any(h_grid >= r / 16.0) or np.any(h_grid <= 0):
        raise PreconditionError("h must lie in (0, r/16)")
    if len(boundary[0]) != d:
        raise PreconditionError(f"boundary box must have {d} coordinates")
    if _box_distance(boundary) <= 4.0 * r:
        raise PreconditionError("boundary data must be supported outside B(0, 4r)")

    ball = Ball.centered(d, 4.0 * r)
    evaluator = harmonic_evaluator(spec, ball, boundary, cfg, method)
    center_value, _ = evaluator.value(np.zeros(d))
    lhs, rhs, points = [], [], []
    excluded = 0
    for h in h_grid:
        x = np.zeros(d)
        x[0] = h
        if isinstance(evaluator, MonteCarloHarmonic):
            estimate = sampling.harmonic_difference(spec, ball, evaluator.boundary_f, x, cfg)
            diff, err = estimate.value, estimate.stderr
            if abs(diff) < 3.0 * err:
                excluded += 1
                continue
        else:
            diff, err = evaluator.difference(x, np.asarray(reflect(x)))
        lhs.append(diff)
        rhs.append(h * center_value / r)
        points.append({'h': float(h), 'stderr': err})
    report = BoundReport(name='lipschitz_reflection', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label, excluded=excluded,
                         details={'f0': center_value, 'r': r})
    logger.info(f"{spec.label}: {report}")
    return report


# ================================================
# COUNTEREXAMPLE
# ================================================

def counterexample_spec(alpha: float, gamma: float, beta: Optional[float] = None) -> ProcessSpec:
    parameters = [('alpha', float(alpha)), ('gamma', float(gamma))]
    if beta is not None:
        parameters.append(('beta', float(beta)))
    return ProcessSpec(kind='counterexample', dimension=1, parameters=tuple(sorted(parameters)),
                       spec_id='counterexample', r_min=1e-7, r_max=1e7, points=281)


def g_difference(spec: ProcessSpec, beta: float, y: float) -> float:
    """
    g(y) - g(-y) = ∫_1^2 [ν(z - y) - ν(z + y)] (z - 1)^{-β} dz for y ∈ (0, 1/2)

    The (z - 1)^{-β} singularity is taken by an algebraic quadrature weight.
    """
    nu = levy_density(spec)

    def bracket(z):
        return float(nu(z - y)) - float(nu(z + y))

    head = integrate.quad(bracket, 1.0, 1.0 + y, weight='alg', wvar=(-beta, 0.0), limit=200)[0]
    offsets = [1.0 + y * 10.0 ** k for k in np.arange(0.5, 12.0, 0.5) if 1.0 + y * 10.0 ** k < 2.0 - y]
    tail = integrate.quad(lambda z: bracket(z) * (z - 1.0) ** (-beta), 1.0 + y, 2.0,
                          points=offsets + [2.0 - y], limit=400, epsabs=0.0, epsrel=1e-10)[0]
    return float(head + tail)


def _reflected_green_lead(potential: RadialProfile, x: float, y):
    """∫_0^1 p̃_t(x, y) dt = U¹(|x - y|) - U¹(x + y)"""
    y = np.asarray(y, dtype=float)
    return potential(np.abs(y - x)) - potential(x + y)


def f_difference(potential: RadialProfile, g_table: RadialProfile, x: float) -> float:
    """Leading part ∫_0^{1/2} (U¹(|x - y|) - U¹(x + y)) (g(y) - g(-y)) dy"""
    def integrand(y):
        return float(_reflected_green_lead(potential, x, y) * g_table(y))

    edges = [0.0, x, 2.0 * x] + [e for e in np.geomspace(4.0 * x, 0.5, 12) if e > 2.0 * x]
    edges = sorted(set(min(e, 0.5) for e in edges))
    return float(sum(integrate.quad(integrand, a, b, limit=200, epsabs=0.0, epsrel=1e-8)[0]
                     for a, b in zip(edges[:-1], edges[1:]) if b > a))


def killed_bound(potential: RadialProfile, x: float, exits: Tuple[float, float] = (0.5, 2.5),
                 points: int = 801) -> float:
    """
    sup over z in the exit range of U¹(z - x) - U¹(z + x)

    Bounds the killed part E^y[∫ p̃_{t-τ}(x, X(τ)) dt; τ < 1] for every y in (0, 1/2):
    the reflected walk leaves (0, 1/2) into [1/2, 5/2] and p̃ ≥ 0 there.
    """
    z = np.linspace(exits[0], exits[1], points)
    return float(max(np.max(_reflected_green_lead(potential, x, z)), 0.0))


def g_mass(g_table: RadialProfile) -> float:
    """∫_0^{1/2} (g(y) - g(-y)) dy on the tabulated grid"""
    values = np.asarray(g_table.values, dtype=float)
    if np.any(values < 0):
        logger.warning(f"g(y) - g(-y) negative at {int(np.sum(values < 0))} grid points; "
                       f"the killed bound uses its positive part")
    return float(integrate.trapezoid(np.clip(values, 0.0, None), g_table.grid))


def run_counterexample(alpha: float = 0.3, gamma: float = 0.6, beta: float = 0.95,
                       x_grid: Optional[Sequence[float]] = None, y_grid: Optional[Sequence[float]] = None,
                       tolerance: float = 0.05, margin: float = 0.02) -> CounterexampleReport:
    """
    Exponent fits showing f'(0) does not exist for the compactly supported ν example

    (a) quadrature of g(y) - g(-y) and its log-log slope against 1 - β + γ;
    (b) f(x) - f(-x) bounded below by the leading Green-difference part ∫_0^1 p̃_t dt
    minus the killed bound times ∫ (g(y) - g(-y)) dy; the local exponent of this lower
    envelope on the smallest decade of x must stay below 1 - margin. The leading part
    alone is kept in f_leading.

    Raises:
        PreconditionError: infeasible (α, γ, β), listing the violated inequalities
    """
    is_valid, error = validate_counterexample_triple(alpha, gamma, beta)
    if not is_valid:
        raise PreconditionError(f"infeasible counterexample parameters: {error}",
                                {'alpha': alpha, 'gamma': gamma, 'beta': beta})
    spec = counterexample_spec(alpha, gamma, beta)
    y_grid = np.geomspace(1e-7, 1e-4, 16) if y_grid is None else np.asarray(y_grid, dtype=float)
    x_grid = np.geomspace(1e-6, 1e-2, 13) if x_grid is None else np.asarray(x_grid, dtype=float)

    logger.info(f"Counterexample α={alpha:g} γ={gamma:g} β={beta:g}: g-difference on {y_grid.size} points")
    g_values = np.array([g_difference(spec, beta, float(y)) for y in y_grid])
    g_exponent, _ = fit_log_slope(y_grid, g_values)

    table_y = np.geomspace(min(1e-10, 0.1 * x_grid.min()), 0.5, 64)
    g_table = RadialProfile(grid=table_y, values=np.array([g_difference(spec, beta, float(y)) for y in table_y]),
                            d=1, kind='generic', spec_id=spec.label)
    potential_grid = np.concatenate([np.geomspace(1e-2 * x_grid.min(), 0.25, 67, endpoint=False),
                                     np.linspace(0.25, 3.0, 56)])
    potential = truncated_potential(spec, 1.0, d=1, grid=potential_grid)
    leading = np.array([f_difference(potential, g_table, float(x)) for x in x_grid])
    bounds = np.array([killed_bound(potential, float(x)) for x in x_grid])
    f_values = leading - bounds * g_mass(g_table)
    smallest = x_grid <= 10.0 * x_grid.min() * (1.0 + 1e-9)
    f_exponent, _ = fit_log_slope(x_grid[smallest], f_values[smallest])
    quotient = f_values / (2.0 * x_grid)

    report = CounterexampleReport(
        alpha=alpha, gamma=gamma, beta=beta,
        g_exponent=float(g_exponent), g_expected=1.0 - beta + gamma, g_tolerance=tolerance,
        f_exponent=float(f_exponent), f_threshold=1.0 - margin,
        quotient_growing=bool(np.all(np.diff(quotient) < 0)),
        y=y_grid, g_difference=g_values, x=x_grid, f_difference=f_values,
        f_leading=leading, killed_bound=bounds,
    )
    logger.info(str(report))
    return report
