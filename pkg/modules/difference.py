"""
Difference process
Reflected-difference kernel p̃_t(x, y) = p_t(x - y) - p_t(x̂ - y), its Lévy
kernel ν̃, ball Green functions and the half-ball Green-difference checks
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import RegularGridInterpolator

import config
from config import logger
from errors import (InsufficientSamplesError, PreconditionError, QuadratureError, UnimodalityError,
                    UnsupportedRouteError)
from models.process import Ball, ProcessSpec
from models.reports import BoundReport
from models.samples import HarmonicEstimate, PathConfig, reflect
from modules import sampling, symbols
from modules.levy_measures import levy_density
from modules.transforms import cached_transition_density, compensated_potential, compensated_potential_at
from services import stable_ball

GREEN_METHODS = ('closed_form', 'occupation', 'killed_kernel')

# Relative MC error above which a Green difference is rejected
MAX_RELATIVE_ERROR = 0.25

# Occupation histogram resolution per axis
OCCUPATION_BINS = 80


# ================================================
# KERNELS
# ================================================

def _points(x, d: int) -> np.ndarray:
    """(n, d) view of a point, a list of points, or scalars in d = 1"""
    x = np.asarray(x, dtype=float)
    if x.size % d:
        raise PreconditionError(f"points must have {d} coordinates, got shape {x.shape}")
    return x.reshape(-1, d)


def _distances(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """|x - y| and |x̂ - y|, written so both are symmetric in (x, y) bit for bit"""
    rest = np.sum((x[..., 1:] - y[..., 1:]) ** 2, axis=-1)
    near = np.sqrt((x[..., 0] - y[..., 0]) ** 2 + rest)
    far = np.sqrt((x[..., 0] + y[..., 0]) ** 2 + rest)
    return near, far


def density_evaluator(spec: ProcessSpec, t: float, d: Optional[int] = None) -> Callable:
    """r ↦ p_t(r) in dimension d: closed form for Cauchy, tabulated profile otherwise"""
    d = spec.dimension if d is None else d
    if spec.is_cauchy:
        return lambda r: stable_ball.cauchy_density(d, t, np.asarray(r, dtype=float))
    profile = cached_transition_density(spec, float(t), d)
    origin = profile.meta.get('origin_value')

    def evaluate(r):
        r = np.asarray(r, dtype=float)
        below = r < profile.grid[0]
        out = np.asarray(profile(np.maximum(r, profile.grid[0])), dtype=float)
        if origin is not None and np.isfinite(origin):
            out = np.where(below, origin, out)
        return out
    return evaluate


@dataclass(frozen=True, eq=False)
class DifferenceKernel:
    """p̃_t(x, y) on the half-space {x₁ > 0} for one (spec, t)"""

    spec: ProcessSpec
    t: float
    d: int

    @classmethod
    def for_spec(cls, spec: ProcessSpec, t: float, d: Optional[int] = None) -> 'DifferenceKernel':
        if t <= 0:
            raise PreconditionError(f"t must be positive, got {t}")
        return cls(spec=spec, t=float(t), d=spec.dimension if d is None else d)

    @cached_property
    def density(self) -> Callable:
        return density_evaluator(self.spec, self.t, self.d)

    @cached_property
    def peak(self) -> float:
        return float(self.density(0.0))

    def __call__(self, x, y) -> np.ndarray:
        x = _points(x, self.d)
        y = _points(y, self.d)
        if np.any(x[..., 0] < 0) or np.any(y[..., 0] < 0):
            raise PreconditionError("difference kernel is defined on the half-space x₁ ≥ 0")
        near, far = _distances(x, y)
        value = self.density(near) - self.density(far)
        floor = config.NOISE_FLOOR * self.peak
        if np.any(value < -floor):
            worst = float(np.min(value))
            raise UnimodalityError(f"p̃_t negative ({worst:.3g}) for {self.spec.label} at t={self.t:g}",
                                   {'t': self.t, 'min': worst})
        value = np.maximum(value, 0.0)
        return value if value.size > 1 else float(value.reshape(-1)[0])


def diff_kernel(spec: ProcessSpec, t: float, x, y) -> np.ndarray:
    """
    p̃_t(x, y) = p_t(x - y) - p_t(x̂ - y)

    Args:
        spec: Process spec (p_t tabulated or closed form)
        t: Time (> 0)
        x, y: Points of the closed half-space, scalars in d = 1

    Returns:
        Nonnegative value(s), at most p_t(x - y)

    Raises:
        UnimodalityError: negative beyond the noise floor
    """
    return DifferenceKernel.for_spec(spec, t)(x, y)


def _quad_checked(func, a, b, **kwargs) -> float:
    result = integrate.quad(func, a, b, full_output=1, **kwargs)
    if len(result) > 3:
        raise QuadratureError(f"half-line quadrature on [{a:g}, {b:g}] did not converge: {result[3]}",
                              details={'value': result[0], 'error': result[1]})
    return float(result[0])


def chapman_check(spec: ProcessSpec, t: float, s: float, x: float, z: float) -> float:
    """
    |∫_0^∞ p̃_t(x, y) p̃_s(y, z) dy - p̃_{t+s}(x, z)| in d = 1

    Raises:
        UnsupportedRouteError: d != 1
        QuadratureError: half-line quadrature did not converge
    """
    if spec.dimension != 1:
        raise UnsupportedRouteError("Chapman-Kolmogorov check is implemented in d = 1")
    if x <= 0 or z <= 0:
        raise PreconditionError("x and z must lie in the open half-line")
    first = DifferenceKernel.for_spec(spec, t)
    second = DifferenceKernel.for_spec(spec, s)

    def integrand(y):
        return first(x, y) * second(y, z)

    edges = sorted({0.0, x, z, 2.0 * max(x, z)})
    total = sum(_quad_checked(integrand, a, b, limit=400, epsabs=1e-14, epsrel=1e-11)
                for a, b in zip(edges[:-1], edges[1:]))
    total += _quad_checked(integrand, edges[-1], np.inf, limit=400, epsabs=1e-14, epsrel=1e-11)
    direct = float(diff_kernel(spec, t + s, x, z))
    residual = abs(total - direct)
    logger.debug(f"Chapman {spec.label} t={t:g} s={s:g} x={x:g} z={z:g}: residual {residual:.3g}")
    return residual


def chapman_report(spec: ProcessSpec, t: float, s: float,
                   pairs: Iterable[Tuple[float, float]]) -> BoundReport:
    """Residuals against 1e-4·p̃_{t+s}(x, z) + 1e-8 on a set of (x, z) pairs"""
    lhs, rhs, points = [], [], []
    for x, z in pairs:
        lhs.append(chapman_check(spec, t, s, x, z))
        rhs.append(config.CHAPMAN_REL_TOL * float(diff_kernel(spec, t + s, x, z)) + config.CHAPMAN_ABS_TOL)
        points.append({'t': t, 's': s, 'x': x, 'z': z})
    report = BoundReport(name='chapman', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fixed_constant', tolerance=0.0, spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def tilde_nu(spec: ProcessSpec, v, z) -> np.ndarray:
    """ν̃(v, z) = ν(v - z) - ν(v̂ - z) for v, z in the half-space"""
    nu = levy_density(spec)
    d = spec.dimension
    v = _points(v, d)
    z = _points(z, d)
    near, far = _distances(v, z)
    with np.errstate(divide='ignore'):
        value = np.where(near > 0, np.asarray(nu(np.maximum(near, 1e-300)), dtype=float)
                         - np.asarray(nu(far), dtype=float), np.inf)
    value = np.where(far == near, 0.0, value)
    return value if value.size > 1 else float(value.reshape(-1)[0])


def halfspace_mass(spec: ProcessSpec, t: float, x) -> Dict[str, float]:
    """
    P̃_t(x, R^d_+) = P(|X¹_t| < x₁) and the cemetery mass 1 - P̃_t(x, R^d_+)

    Uses the one-dimensional projection, which has the same radial exponent.
    """
    x1 = float(np.atleast_1d(x)[0])
    if x1 < 0:
        raise PreconditionError("x must lie in the closed half-space")
    density = density_evaluator(spec.with_dimension(1) if spec.dimension != 1 else spec, t, 1)
    mass = 2.0 * integrate.quad(lambda r: float(density(r)), 0.0, x1, limit=200,
                                epsabs=1e-14, epsrel=1e-10)[0] if x1 > 0 else 0.0
    mass = min(mass, 1.0)
    return {'mass': mass, 'cemetery': 1.0 - mass, 't': t, 'x1': x1}


# ================================================
# GREEN FUNCTIONS
# ================================================

def _green_closed_form(spec: ProcessSpec, radius: float, x: np.ndarray, y: np.ndarray):
    alpha = spec.stability_index
    values = np.atleast_1d(stable_ball.green_function(alpha, spec.dimension, radius, x, y))
    return values, np.zeros_like(values)


def _occupation_edges(d: int, radius: float):
    edges = np.linspace(-radius, radius, OCCUPATION_BINS + 1)
    return edges if d == 1 else (edges, edges)


def _green_occupation(spec: ProcessSpec, radius: float, x: np.ndarray, y: np.ndarray, cfg: PathConfig):
    d = spec.dimension
    if d not in (1, 2):
        raise UnsupportedRouteError("occupation Green functions are tabulated for d = 1 or 2 only")
    ball = Ball.centered(d, radius)
    table = sampling.occupation_green(spec, ball, x[0], _occupation_edges(d, radius), cfg)
    if d == 1:
        values = np.interp(y[:, 0], table['centers'], table['value'])
        errors = np.interp(y[:, 0], table['centers'], table['stderr'])
    else:
        axes = tuple(table['centers'])
        values = RegularGridInterpolator(axes, table['value'], bounds_error=False, fill_value=None)(y)
        errors = RegularGridInterpolator(axes, table['stderr'], bounds_error=False, fill_value=None)(y)
    return np.asarray(values), np.asarray(errors)


def _compensated(spec: ProcessSpec, table, r: np.ndarray) -> np.ndarray:
    """W on the table grid, direct evaluation off it"""
    r = np.abs(r)
    out = np.empty_like(r)
    inside = (r >= table.grid[0]) & (r <= table.grid[-1])
    out[inside] = table(r[inside])
    if np.any(~inside):
        out[~inside] = np.atleast_1d(compensated_potential_at(spec, r[~inside]))
    return out


def _killed_terms(spec: ProcessSpec, radius: float, x: np.ndarray, y: np.ndarray, cfg: PathConfig):
    """Per-path terms W(x - y) - W(X(τ_B) - y), one column per y"""
    if spec.dimension != 1:
        raise UnsupportedRouteError("killed-kernel Green functions are implemented in d = 1")
    table = compensated_potential(spec)
    ball = Ball.centered(1, radius)
    samples = sampling.sample_exit(spec, ball, x[0], cfg)
    exits = samples.x_exit[samples.exited][:, 0]
    head = _compensated(spec, table, x[0, 0] - y[:, 0])
    terms = np.empty((exits.size, y.shape[0]))
    for j, yj in enumerate(y[:, 0]):
        terms[:, j] = head[j] - _compensated(spec, table, exits - yj)
    return terms


def _green_killed(spec: ProcessSpec, radius: float, x: np.ndarray, y: np.ndarray, cfg: PathConfig):
    terms = _killed_terms(spec, radius, x, y, cfg)
    n = terms.shape[0]
    return terms.mean(axis=0), terms.std(axis=0, ddof=1) / np.sqrt(n)


def _resolve_method(spec: ProcessSpec, method: str) -> str:
    if method == 'auto':
        if spec.stability_index is not None:
            return 'closed_form'
        return 'killed_kernel' if spec.dimension == 1 else 'occupation'
    if method not in GREEN_METHODS:
        raise ValueError(f"method must be one of {GREEN_METHODS} or 'auto', got '{method}'")
    if method == 'closed_form' and spec.stability_index is None:
        raise UnsupportedRouteError(f"no closed-form Green function for {spec.label}")
    return method


def green_ball(spec: ProcessSpec, radius: float, x, y, method: str = 'auto',
               cfg: PathConfig = PathConfig()) -> Tuple[np.ndarray, np.ndarray]:
    """
    G_B(x, y) for B = B(0, radius) at one x and a set of y

    Args:
        spec: Process spec
        radius: Ball radius
        x: Pole (single point)
        y: Evaluation points ((n, d) array, or scalars in d = 1)
        method: 'closed_form' (stable), 'occupation' (MC histograms, d ≤ 2),
            'killed_kernel' (d = 1, compensated potential with MC exits) or 'auto'
        cfg: Path configuration for the Monte Carlo routes

    Returns:
        (values, standard errors); errors are zero for the closed form
    """
    d = spec.dimension
    x = _points(x, d)[:1]
    y = _points(y, d)
    method = _resolve_method(spec, method)
    if method == 'closed_form':
        return _green_closed_form(spec, radius, x, y)
    if method == 'occupation':
        return _green_occupation(spec, radius, x, y, cfg)
    return _green_killed(spec, radius, x, y, cfg)


def diff_green_halfball(spec: ProcessSpec, radius: float, x, y, method: str = 'auto',
                        cfg: PathConfig = PathConfig()) -> Tuple[float, float]:
    """
    G̃_{B+}(x, y) = G_B(x, y) - G_B(x̂, y) = G_B(x, y) - G_B(x, ŷ)

    The second form keeps both terms on one set of paths.

    Returns:
        (value, error)

    Raises:
        InsufficientSamplesError: error above 25% of the value
    """
    d = spec.dimension
    xp = _points(x, d)[:1]
    yp = _points(y, d)[:1]
    if xp[0, 0] <= 0 or yp[0, 0] <= 0:
        raise PreconditionError("x and y must lie in the open half-ball")
    mirrored = np.asarray(reflect(yp[0]), dtype=float).reshape(1, d)
    method = _resolve_method(spec, method)
    if method == 'killed_kernel':
        terms = _killed_terms(spec, radius, xp, np.vstack([yp, mirrored]), cfg)
        diff = terms[:, 0] - terms[:, 1]
        value, error = float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(diff.size))
    else:
        values, errors = green_ball(spec, radius, xp, np.vstack([yp, mirrored]), method, cfg)
        value, error = float(values[0] - values[1]), float(errors[0] + errors[1])
    if error > MAX_RELATIVE_ERROR * abs(value):
        raise InsufficientSamplesError(f"G̃ error {error:.3g} exceeds 25% of {value:.3g}",
                                       {'value': value, 'error': error})
    return value, error


# ================================================
# CHECKS
# ================================================

def check_domination(spec: ProcessSpec, radius: float, boxes: Sequence[Tuple[Sequence[float], Sequence[float]]],
                     x, cfg: PathConfig = PathConfig()) -> BoundReport:
    """
    P̃^x(X̃(τ_{B+}) ∈ A) ≤ P^x(X(τ_B) ∈ A) for boxes A in the right half-space outside the ball

    The left side is the signed mirror-coupling estimate E^x[1_A(X_τ) - 1_A(X̂_τ)];
    details record whether it is nonnegative within 3 stderr.
    """
    ball = Ball.centered(spec.dimension, radius)
    samples = sampling.sample_exit(spec, ball, x, cfg)
    lhs, rhs, points = [], [], []
    nonnegative = True
    for lower, upper in boxes:
        indicator = sampling.box_indicator(lower, upper)
        signed = sampling.harmonic_difference(spec, ball, indicator, x, cfg, samples=samples)
        plain = sampling.harmonic_eval(spec, ball, indicator, x, cfg, check_mean_value=False, samples=samples)
        nonnegative &= signed.value >= -3.0 * signed.stderr
        lhs.append(signed.value)
        rhs.append(plain.value)
        points.append({'lower': list(lower), 'upper': list(upper), 'signed_stderr': signed.stderr,
                       'stderr': plain.stderr})
    report = BoundReport(name='domination', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fixed_constant', tolerance=0.0, spec_id=spec.label,
                         details={'signed_nonnegative': bool(nonnegative)})
    logger.info(f"{spec.label}: {report}")
    return report


def _stable_green_integrals(spec: ProcessSpec, r: float, h: float) -> Tuple[float, float]:
    alpha = spec.stability_index

    def green(x, y):
        return float(stable_ball.green_function(alpha, 1, r, [x], [y]))

    weighted = integrate.quad(lambda y: (green(h, y) - green(-h, y)) * y, 0.0, r, points=[h],
                              limit=400, epsabs=1e-14, epsrel=1e-9)[0]
    inner = integrate.quad(lambda y: green(h, y), -0.25 * r, 0.25 * r, points=[h],
                           limit=400, epsabs=1e-14, epsrel=1e-9)[0]
    return weighted, inner


def check_green_integral(spec: ProcessSpec, r: float = 1.0, h_grid: Optional[Sequence[float]] = None,
                         cfg: PathConfig = PathConfig()) -> BoundReport:
    """
    ∫_{B+} G̃_{B+}(x, y)|y| dy ≤ c |x| ∫_{B(0,r/4)} G_B(x, y) dy for x = h e₁, h < r/16

    Stable d = 1 by quadrature of the closed form; otherwise both sides are
    occupation integrals of one set of paths (mirror coupling on the left).
    """
    h_grid = np.geomspace(r / 1600.0, r / 20.0, 12) if h_grid is None else np.asarray(h_grid, dtype=float)
    if np.any(h_grid >= r / 16.0):
        raise PreconditionError("h must lie in (0, r/16)")
    d = spec.dimension
    ball = Ball.centered(d, r)

    def signed_norm(p):
        return np.linalg.norm(p, axis=1) * np.sign(p[:, 0])

    def inner_ball(p):
        return (np.linalg.norm(p, axis=1) < 0.25 * r).astype(float)

    lhs, rhs, points = [], [], []
    for h in h_grid:
        if spec.stability_index is not None and d == 1:
            weighted, inner = _stable_green_integrals(spec, r, float(h))
            errors = (0.0, 0.0)
        else:
            x = np.zeros(d)
            x[0] = h
            first, second = sampling.occupation_integrals(spec, ball, x, (signed_norm, inner_ball), cfg)
            weighted, inner = first.value, second.value
            errors = (first.stderr, second.stderr)
        lhs.append(weighted)
        rhs.append(h * inner)
        points.append({'h': float(h), 'stderr_lhs': errors[0], 'stderr_rhs': errors[1]})
    report = BoundReport(name='green_integral', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def _lifted_potential(spec: ProcessSpec) -> Callable:
    """U^{(d+2)}: Riesz kernel for stable specs, tabulated potential otherwise"""
    d = spec.dimension + 2
    alpha = spec.stability_index
    if alpha is not None:
        constant = stable_ball.riesz_constant(d, alpha)
        return lambda r: constant * np.asarray(r, dtype=float) ** (alpha - d)
    from modules.transforms import potential_kernel
    return potential_kernel(spec, d)


def check_green_hat_bound(spec: ProcessSpec, radius: float = 1.0,
                          x_values: Sequence[float] = (0.005, 0.01, 0.02, 0.04),
                          y_fractions: Sequence[float] = (0.2, 0.35, 0.5, 0.65, 0.8, 0.95),
                          method: str = 'auto', cfg: PathConfig = PathConfig()) -> Tuple[BoundReport, BoundReport]:
    """
    G̃_{B+}(x, y) ≤ c|x - x̂||y| U^{(d+2)}(|y|/2) ≤ c|x - x̂| L²(|y|)/|y|^{d+1} for |y| ≥ 4|x|

    Points are x = x₁e₁ and y = q·radius·e₁.

    Returns:
        (potential form, scale-function form), both with fitted constants
    """
    d = spec.dimension
    potential = _lifted_potential(spec)
    lhs, rhs_u, rhs_l, points = [], [], [], []
    for x1 in x_values:
        for q in y_fractions:
            y1 = q * radius
            if y1 < 4.0 * x1:
                continue
            x = np.zeros(d)
            x[0] = x1
            y = np.zeros(d)
            y[0] = y1
            value, error = diff_green_halfball(spec, radius, x, y, method, cfg)
            gap = 2.0 * x1
            lhs.append(value)
            rhs_u.append(gap * y1 * float(potential(0.5 * y1)))
            rhs_l.append(gap * float(symbols.scale_L(spec, y1)) ** 2 / y1 ** (d + 1))
            points.append({'x1': x1, 'y1': y1, 'error': error})
    if not points:
        raise PreconditionError("no (x, y) pair satisfies |y| ≥ 4|x|")
    first = BoundReport(name='green_hat_potential', points=points, lhs=np.array(lhs), rhs=np.array(rhs_u),
                        fit_mode='fit_constant', spec_id=spec.label)
    second = BoundReport(name='green_hat_scale', points=points, lhs=np.array(lhs), rhs=np.array(rhs_l),
                         fit_mode='fit_constant', spec_id=spec.label)
    logger.info(f"{spec.label}: {first}; {second}")
    return first, second


def check_tilde_green_bound(spec: ProcessSpec, radii: Sequence[float] = (0.25, 0.5, 1.0),
                            h_fractions: Sequence[float] = (0.005, 0.02, 0.05),
                            y_fractions: Sequence[float] = (0.3, 0.5, 0.7, 0.9, 0.97),
                            method: str = 'auto', cfg: PathConfig = PathConfig()) -> BoundReport:
    """
    G̃_{B+}(h e₁, y) ≤ c h L(δ(y)) L(r) / r^{d+1} for r ≤ 1, h < r/16, y ∈ B+ outside B(0, r/4)
    """
    d = spec.dimension
    lhs, rhs, points = [], [], []
    for r in radii:
        if r > 1.0:
            raise PreconditionError("radii must not exceed 1")
        L_r = float(symbols.scale_L(spec, r))
        for hf in h_fractions:
            h = hf * r
            if h >= r / 16.0:
                raise PreconditionError("h must lie in (0, r/16)")
            for q in y_fractions:
                x = np.zeros(d)
                x[0] = h
                y = np.zeros(d)
                y[0] = q * r
                value, error = diff_green_halfball(spec, r, x, y, method, cfg)
                lhs.append(value)
                rhs.append(h * float(symbols.scale_L(spec, r - q * r)) * L_r / r ** (d + 1))
                points.append({'r': r, 'h': h, 'y1': q * r, 'error': error})
    report = BoundReport(name='tilde_green', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def check_ring(spec: ProcessSpec, r: float = 1.0, fractions: Sequence[float] = (0.76, 0.8, 0.85, 0.9, 0.95),
               cfg: PathConfig = PathConfig()) -> BoundReport:
    """
    P^y(X(τ_R) ∈ B(0, r) \\ R) ≤ c L(δ(y))/L(r) on the annulus R = B(0, r) \\ B̄(0, r/2)

    y = q·r·e₁ with 3/4 ≤ q < 1; exits into the inner ball are counted.
    """
    d = spec.dimension
    annulus = Ball.centered(d, r, inner_radius=0.5 * r)
    L_r = float(symbols.scale_L(spec, r))
    lhs, rhs, points = [], [], []
    for q in fractions:
        if not 0.75 <= q < 1.0:
            raise PreconditionError("ring points must satisfy 3r/4 ≤ |y| < r")
        y = np.zeros(d)
        y[0] = q * r
        samples = sampling.sample_exit(spec, annulus, y, cfg)
        inward = (np.linalg.norm(samples.x_exit[samples.exited], axis=1) <= 0.5 * r).astype(float)
        estimate = HarmonicEstimate.from_terms(inward, samples.censored_fraction, cfg.seed)
        lhs.append(estimate.value)
        rhs.append(float(symbols.scale_L(spec, r - q * r)) / L_r)
        points.append({'y1': q * r, 'stderr': estimate.stderr})
    report = BoundReport(name='ring', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report
