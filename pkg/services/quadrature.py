"""
Bessel-kernel quadrature
Integrals of the form ∫ g(r) k_ν(rR) dr with k_ν(s) = s^{-ν} J_ν(s)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gamma, jv, jvp

import config
from config import logger
from errors import DomainError, QuadratureError
from utils.grids import power_law_exponent, unit_sphere_area

STRATEGIES = ('auto', 'zero_partitioned', 'adaptive_compact', 'tail_truncated')

# Largest radius probed when looking for the decay of an integrand
_SCAN_MAX = 1e40
_SCAN_POINTS = 1200
# Relative size of the integrand envelope below which the tail is dropped
_TAIL_CUT = 1e-17


@dataclass(frozen=True)
class QuadratureResult:
    """Value of one Bessel-kernel integral with its diagnostics"""

    value: float
    error: float
    strategy: str
    intervals: int
    partial_sums: Tuple[float, ...] = field(default=())


# ================================================
# KERNELS
# ================================================

def bessel_kernel(s, order: float) -> np.ndarray:
    """
    k_ν(s) = s^{-ν} J_ν(s), continuous at s = 0 with k_ν(0) = 2^{-ν}/Γ(ν+1)

    Half-integer orders ±1/2 use their elementary forms.
    """
    s = np.asarray(s, dtype=float)
    if order == -0.5:
        return np.sqrt(2.0 / np.pi) * np.cos(s)
    if order == 0.5:
        with np.errstate(invalid='ignore', divide='ignore'):
            small = np.abs(s) < 1e-4
            safe = np.where(small, 1.0, s)
            out = np.sin(safe) / safe
            out = np.where(small, 1.0 - s * s / 6.0, out)
        return np.sqrt(2.0 / np.pi) * out
    origin = 2.0 ** (-order) / gamma(order + 1.0)
    with np.errstate(invalid='ignore', divide='ignore'):
        safe = np.where(s == 0.0, 1.0, s)
        out = jv(order, safe) * safe ** (-order)
    return np.where(s == 0.0, origin, out)


def bessel_kernel_origin(order: float) -> float:
    return float(2.0 ** (-order) / gamma(order + 1.0))


def kernel_envelope(s, order: float) -> np.ndarray:
    """Upper envelope of |k_ν(s)| used when scanning for integrand decay"""
    s = np.asarray(s, dtype=float)
    origin = bessel_kernel_origin(order)
    with np.errstate(divide='ignore'):
        far = np.sqrt(2.0 / np.pi) * np.where(s > 0, s, np.inf) ** (-order - 0.5)
    return np.minimum(origin, far) if order > -0.5 else np.full_like(s, origin)


@lru_cache(maxsize=32)
def _bessel_zeros_cached(order: float, count: int) -> np.ndarray:
    k = np.arange(1, count + 1, dtype=float)
    if order == -0.5:
        return (k - 0.5) * np.pi
    if order == 0.5:
        return k * np.pi
    # McMahon's expansion refined by Newton steps on J_ν
    mu = 4.0 * order * order
    beta = (k + 0.5 * order - 0.25) * np.pi
    z = beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3)
    for _ in range(6):
        z = z - jv(order, z) / jvp(order, z)
    z.setflags(write=False)
    return z


def bessel_zeros(order: float, count: int) -> np.ndarray:
    """First `count` positive zeros of J_ν"""
    return _bessel_zeros_cached(float(order), int(count))


def euler_average(partial_sums: Iterable[float], levels: int) -> Tuple[float, float]:
    """
    Repeated averaging of consecutive partial sums of an alternating series

    Args:
        partial_sums: Partial sums, at least levels + 1 of them
        levels: Number of averaging passes

    Returns:
        Tuple of (accelerated value, difference between the last two levels)
    """
    s = np.asarray(list(partial_sums), dtype=float)[-(levels + 1):]
    estimates = []
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
        estimates.append(s[-1])
    if len(estimates) < 2:
        return float(estimates[-1]), float('inf')
    return float(estimates[-1]), float(abs(estimates[-1] - estimates[-2]))


def gauss_partition_sum(func: Callable[[np.ndarray], np.ndarray], edges: np.ndarray,
                        nodes: int = config.GAUSS_NODES) -> np.ndarray:
    """
    Gauss-Legendre integral of func over each [edges[i], edges[i+1]]

    Returns:
        Array of per-interval integrals (len(edges) - 1)
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    r = mid[:, None] + half[:, None] * x[None, :]
    values = np.asarray(func(r.ravel()), dtype=float).reshape(r.shape)
    return (values * w[None, :]).sum(axis=1) * half


# ================================================
# ENGINE
# ================================================

@dataclass(frozen=True)
class BesselKernelQuadrature:
    """
    Quadrature of ∫_lower^upper g(r) k_ν(r R) dr

    Strategies: 'adaptive_compact' (R·r_max small, scipy quad),
    'tail_truncated' (integrand decays; Gauss-Legendre on a partition at the
    zeros of J_ν up to the cut radius) and 'zero_partitioned' (slowly decaying
    integrand; interval integrals between zeros summed and accelerated by
    repeated averaging). 'auto' picks one per call.
    """

    order: float
    abs_tol: float = config.QUAD_ABS_TOL
    rel_tol: float = config.QUAD_REL_TOL
    strategy: str = 'auto'
    interval_budget: int = config.QUAD_INTERVAL_BUDGET
    euler_terms: int = config.EULER_TERMS
    euler_levels: int = config.EULER_LEVELS

    def __post_init__(self):
        if self.order < -0.5:
            raise ValueError(f"Bessel order must be >= -1/2, got {self.order}")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy '{self.strategy}'")

    @classmethod
    def for_dimension(cls, d: int, **kwargs) -> 'BesselKernelQuadrature':
        return cls(order=0.5 * d - 1.0, **kwargs)

    # ------------------------------------------------
    # decay detection
    # ------------------------------------------------

    def cut_radius(self, g: Callable, R: float, lower: float = 0.0) -> float:
        """Radius beyond which |g| times the kernel envelope is negligible (inf if never)"""
        start = max(lower, 1e-30)
        r = np.geomspace(start, _SCAN_MAX, _SCAN_POINTS)
        with np.errstate(all='ignore'):
            weight = np.abs(np.asarray(g(r), dtype=float)) * r
            if R > 0:
                weight = weight * kernel_envelope(r * R, self.order)
        weight = np.nan_to_num(weight, nan=0.0, posinf=np.inf)
        top = np.max(weight)
        if not np.isfinite(top):
            return float('inf')
        if top == 0.0:
            return start
        above = np.nonzero(weight > _TAIL_CUT * top)[0]
        last = above[-1]
        if last >= r.size - 2:
            return float('inf')
        return float(r[last + 1])

    # ------------------------------------------------
    # partitions
    # ------------------------------------------------

    @staticmethod
    def _grading(lower: float, upper: float, levels: int = 40) -> np.ndarray:
        if lower > 0:
            up = lower * 2.0 ** np.arange(1, levels)
            down = upper - (upper - lower) * 2.0 ** -np.arange(1, 8)
            return np.concatenate([up[up < upper], down])
        return upper * 2.0 ** -np.arange(1, levels)

    def _edges(self, lower: float, upper: float, R: float,
               breakpoints: Iterable[float], zero_count: int) -> np.ndarray:
        pieces = [np.array([lower, upper]), self._grading(lower, upper),
                  np.linspace(lower, upper, 65)[1:-1]]
        if R > 0 and zero_count > 0:
            zeros = bessel_zeros(self.order, zero_count) / R
            pieces.append(zeros[(zeros > lower) & (zeros < upper)])
        bps = np.asarray(list(breakpoints), dtype=float)
        if bps.size:
            pieces.append(bps[(bps > lower) & (bps < upper)])
        edges = np.unique(np.concatenate(pieces))
        return edges[(edges >= lower) & (edges <= upper)]

    def _zeros_in(self, lower: float, upper: float, R: float) -> int:
        if R <= 0 or not np.isfinite(upper):
            return 0 if R <= 0 else -1
        # asymptotic count of zeros of J_ν in (0, upper R)
        return int(max(0.0, (upper * R) / np.pi - 0.5 * self.order + 0.25)) + 2

    # ------------------------------------------------
    # strategies
    # ------------------------------------------------

    def _adaptive(self, integrand, lower, upper, breakpoints) -> QuadratureResult:
        if np.isfinite(upper):
            pts = np.concatenate([self._grading(lower, upper, 24),
                                  np.asarray(list(breakpoints), dtype=float)])
            pts = np.unique(pts[(pts > lower) & (pts < upper)])
            value, error = integrate.quad(integrand, lower, upper, points=pts[:100] if pts.size else None,
                                          limit=500, epsabs=self.abs_tol, epsrel=self.rel_tol)
        else:
            value, error = integrate.quad(integrand, lower, np.inf, limit=500,
                                          epsabs=self.abs_tol, epsrel=self.rel_tol)
        return QuadratureResult(float(value), float(error), 'adaptive_compact', 1)

    def _truncated(self, func, lower, upper, R, breakpoints) -> QuadratureResult:
        count = self._zeros_in(lower, upper, R)
        edges = self._edges(lower, upper, R, breakpoints, count)
        pieces = gauss_partition_sum(func, edges)
        value = float(np.sum(pieces))
        error = float(np.finfo(float).eps * np.sum(np.abs(pieces)) * np.sqrt(pieces.size))
        return QuadratureResult(value, error, 'tail_truncated', int(edges.size - 1))

    def _accelerated(self, func, lower, R, breakpoints) -> QuadratureResult:
        zeros = bessel_zeros(self.order, self.euler_terms + int(lower * R / np.pi) + 4) / R
        zeros = zeros[zeros > lower][:self.euler_terms]
        if zeros.size <= self.euler_levels + 1:
            raise QuadratureError("not enough Bessel zeros beyond the lower limit for acceleration")
        head_edges = self._edges(lower, zeros[0], R, breakpoints, 0)
        head = float(np.sum(gauss_partition_sum(func, head_edges)))
        # each zero interval split in two halves to resolve its lobe
        mids = 0.5 * (zeros[:-1] + zeros[1:])
        edges = np.empty(2 * zeros.size - 1)
        edges[0::2] = zeros
        edges[1::2] = mids
        bps = np.asarray(list(breakpoints), dtype=float)
        bps = bps[(bps > zeros[0]) & (bps < zeros[-1])]
        if bps.size:
            edges = np.unique(np.concatenate([edges, bps]))
        pieces = gauss_partition_sum(func, edges)
        # aggregate the pieces back onto zero intervals
        owner = np.searchsorted(zeros, edges[:-1], side='right') - 1
        lobes = np.bincount(owner, weights=pieces, minlength=zeros.size - 1)
        partial = head + np.cumsum(lobes)
        value, error = euler_average(partial, self.euler_levels)
        scale = max(abs(value), self.abs_tol)
        if not np.isfinite(value) or error > max(1e4 * self.abs_tol, 1e-6 * scale):
            raise QuadratureError(
                f"oscillatory quadrature did not converge (R={R:g}, error {error:.3g})",
                partial_sums=partial,
                details={'R': R, 'error': error, 'terms': int(partial.size)},
            )
        return QuadratureResult(value, error, 'zero_partitioned', int(partial.size),
                                tuple(float(s) for s in partial[-8:]))

    # ------------------------------------------------
    # entry point
    # ------------------------------------------------

    def integrate(self, g: Callable[[np.ndarray], np.ndarray], R: float, lower: float = 0.0,
                  upper: float = np.inf, breakpoints: Iterable[float] = (),
                  cut: Optional[float] = None) -> QuadratureResult:
        """
        Integrate g(r) k_ν(rR) over [lower, upper]

        Args:
            g: Vectorized radial factor (already multiplied by any r^{d-1})
            R: Frequency / radius (>= 0)
            lower, upper: Integration limits (upper may be inf)
            breakpoints: Radii where g is not smooth
            cut: Precomputed decay radius of g (skips the scan)

        Returns:
            QuadratureResult
        """
        if R < 0:
            raise ValueError(f"R must be >= 0, got {R}")
        breakpoints = tuple(breakpoints)

        def func(r):
            return np.asarray(g(r), dtype=float) * bessel_kernel(r * R, self.order)

        if np.isfinite(upper):
            r_end = upper
        else:
            r_end = cut if cut is not None else self.cut_radius(g, R, lower)
        if r_end <= lower:
            return QuadratureResult(0.0, 0.0, 'tail_truncated', 0)

        strategy = self.strategy
        if strategy == 'auto':
            if np.isfinite(r_end) and R * r_end <= config.COMPACT_OSCILLATION_LIMIT:
                strategy = 'adaptive_compact'
            elif np.isfinite(r_end) and (R == 0 or self._zeros_in(lower, r_end, R) <= self.interval_budget):
                strategy = 'tail_truncated'
            else:
                strategy = 'zero_partitioned'

        logger.debug(f"bessel quadrature: order={self.order} R={R:.4g} r_end={r_end:.4g} {strategy}")

        if strategy == 'adaptive_compact':
            if not np.isfinite(r_end):
                return self._adaptive(lambda r: float(func(np.array([r]))[0]), lower, np.inf, breakpoints)
            return self._adaptive(lambda r: float(func(np.array([r]))[0]), lower, r_end, breakpoints)
        if strategy == 'tail_truncated':
            if not np.isfinite(r_end):
                raise QuadratureError("integrand does not decay; tail truncation impossible",
                                      details={'R': R})
            return self._truncated(func, lower, r_end, R, breakpoints)
        if R == 0:
            raise QuadratureError("zero-partitioned strategy needs R > 0", details={'R': R})
        return self._accelerated(func, lower, R, breakpoints)

    def value(self, g: Callable, R: float, **kwargs) -> float:
        return self.integrate(g, R, **kwargs).value


# ================================================
# LÉVY-KHINTCHINE
# ================================================

def lk_kernel(s, d: int) -> np.ndarray:
    """
    K_d(s) = ω_{d-1} - (2π)^{d/2} k_ν(s), the radial Lévy-Khintchine kernel

    Series in s² near the origin where the difference cancels.
    """
    s = np.asarray(s, dtype=float)
    omega = unit_sphere_area(d)
    if d == 1:
        return 4.0 * np.sin(0.5 * s) ** 2
    if d == 3:
        with np.errstate(invalid='ignore', divide='ignore'):
            safe = np.where(s == 0.0, 1.0, s)
            direct = 4.0 * np.pi * (1.0 - np.sin(safe) / safe)
    else:
        direct = omega - (2.0 * np.pi) ** (0.5 * d) * bessel_kernel(s, 0.5 * d - 1.0)
    s2 = s * s
    series = omega * (s2 / (2.0 * d) - s2 ** 2 / (8.0 * d * (d + 2))
                      + s2 ** 3 / (48.0 * d * (d + 2) * (d + 4))
                      - s2 ** 4 / (384.0 * d * (d + 2) * (d + 4) * (d + 6)))
    return np.where(s < 0.05, series, direct)


def log_quad(func: Callable[[float], float], lower: float, upper: float,
             points: Iterable[float] = (), abs_tol: float = config.QUAD_ABS_TOL,
             rel_tol: float = config.QUAD_REL_TOL) -> float:
    """
    ∫_lower^upper func(r) dr in the variable u = log r, split at the given points

    lower may be 0 and upper may be inf; power laws at either end become
    exponentials in u.
    """
    lo = -np.inf if lower <= 0 else np.log(lower)
    hi = np.inf if not np.isfinite(upper) else np.log(upper)
    cuts = sorted(np.log(p) for p in points if lower < p < upper)
    edges = [lo] + cuts + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        value, _ = integrate.quad(lambda u: func(np.exp(u)) * np.exp(u), a, b,
                                  limit=400, epsabs=abs_tol, epsrel=rel_tol)
        total += value
    return float(total)


def check_levy_integrable(nu: Callable, d: int, split: float = 1.0, support: float = np.inf) -> None:
    """
    ∫_0^split ν(r) r^{d+1} dr and ∫_split^∞ ν(r) r^{d-1} dr must converge

    Judged from the local power law of the integrand (in log r) far into each end.

    Raises:
        DomainError: naming the divergent end
    """
    def slope(weight: Callable, r1: float, r2: float) -> Optional[float]:
        with np.errstate(all='ignore'):
            v1, v2 = float(weight(r1)), float(weight(r2))
        if not (np.isfinite(v1) and np.isfinite(v2)):
            return float('nan')
        return power_law_exponent(r1, v1, r2, v2)

    def near(r):
        return float(np.asarray(nu(r), dtype=float).reshape(-1)[0]) * r ** (d + 2)

    def far(r):
        return float(np.asarray(nu(r), dtype=float).reshape(-1)[0]) * r ** d

    head = slope(near, split * 1e-10, split * 1e-9)
    if head is not None and not head > 1e-3:
        raise DomainError(f"ν(r) r^{d + 1} is not integrable at r → 0 (local exponent {head:.3g})",
                          {'end': 'zero', 'slope': head, 'd': d})
    if np.isfinite(support):
        return
    scale = max(split, 1.0)
    tail = slope(far, scale * 1e9, scale * 1e10)
    if tail is not None and not tail < -1e-3:
        raise DomainError(f"ν(r) r^{d - 1} is not integrable at r → ∞ (local exponent {tail:.3g})",
                          {'end': 'infinity', 'slope': tail, 'd': d})


def levy_khintchine_integral(nu: Callable, d: int, R: float, breakpoints: Iterable[float] = (),
                             support: float = np.inf,
                             engine: Optional[BesselKernelQuadrature] = None) -> float:
    """
    ψ(R) = ∫_0^∞ K_d(rR) ν(r) r^{d-1} dr for a radial Lévy density ν

    The range is split at the first zero of J_ν over R: below it the kernel
    is evaluated directly; above it the non-oscillatory ω_{d-1}ν part is
    integrated in log r and the Bessel part goes through the oscillatory engine.

    Args:
        nu: Vectorized radial Lévy density
        d: Dimension
        R: Frequency (>= 0)
        breakpoints: Radii where ν is not smooth
        support: ν vanishes beyond this radius

    Returns:
        ψ(R)

    Raises:
        DomainError: ν is not a Lévy density (divergent at 0 or at infinity)
    """
    if R < 0:
        raise ValueError(f"R must be >= 0, got {R}")
    if R == 0:
        return 0.0
    engine = engine or BesselKernelQuadrature.for_dimension(d)
    breakpoints = tuple(float(b) for b in breakpoints)
    first_zero = float(bessel_zeros(engine.order, 1)[0])
    split = min(first_zero / R, support)
    check_levy_integrable(nu, d, split, support)

    def weight(r):
        return np.asarray(nu(r), dtype=float) * np.asarray(r, dtype=float) ** (d - 1)

    head = log_quad(lambda r: float(lk_kernel(r * R, d) * weight(r)), 0.0, split, breakpoints)
    if split >= support:
        return head

    flat = log_quad(lambda r: float(weight(r)), split, support, breakpoints)
    oscillating = engine.integrate(weight, R, lower=split, upper=support, breakpoints=breakpoints).value
    value = head + unit_sphere_area(d) * flat - (2.0 * np.pi) ** (0.5 * d) * oscillating
    logger.debug(f"Lévy-Khintchine d={d} R={R:.4g}: {value:.10g}")
    return float(value)
