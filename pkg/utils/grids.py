"""
Grid utilities
Log-spaced grids, finite-difference stencils and radial integration
"""

from typing import Optional, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.special import gammaln

import config
from config import logger


def log_grid(r_min: float = config.GRID_R_MIN, r_max: float = config.GRID_R_MAX,
             points: int = config.GRID_POINTS) -> np.ndarray:
    """
    Build a log-spaced grid

    Args:
        r_min: First grid point (> 0)
        r_max: Last grid point
        points: Number of points

    Returns:
        Strictly increasing array of radii
    """
    if not 0 < r_min < r_max:
        raise ValueError(f"log grid needs 0 < r_min < r_max, got {r_min}, {r_max}")
    return np.geomspace(r_min, r_max, points)


def unit_sphere_area(d: int) -> float:
    """ω_{d-1} = 2π^{d/2}/Γ(d/2), the area of the unit sphere in R^d"""
    return float(2.0 * np.exp(0.5 * d * np.log(np.pi) - gammaln(0.5 * d)))


def is_log_uniform(grid: np.ndarray, rtol: float = 1e-6) -> bool:
    steps = np.diff(np.log(grid))
    return bool(np.all(np.abs(steps - steps[0]) <= rtol * abs(steps[0])))


def log_derivative(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    d values / dr on a log-uniform grid

    Fourth-order central differences in u = log r (one-sided fourth-order
    stencils at both ends), then chain rule dv/dr = (dv/du) / r.

    Args:
        grid: Log-uniform radii (at least 5 points)
        values: Function values on the grid

    Returns:
        Derivative with respect to r at every grid point
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 5:
        raise ValueError("log_derivative needs at least 5 points")
    h = float(np.log(grid[1] / grid[0]))
    dv = np.empty(n)
    dv[2:-2] = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
    # one-sided fourth-order stencils
    for i in (0, 1):
        w = v[i:i + 5]
        dv[i] = (-25.0 * w[0] + 48.0 * w[1] - 36.0 * w[2] + 16.0 * w[3] - 3.0 * w[4]) / (12.0 * h)
    for i in (n - 1, n - 2):
        w = v[i - 4:i + 1]
        dv[i] = (25.0 * w[4] - 48.0 * w[3] + 36.0 * w[2] - 16.0 * w[1] + 3.0 * w[0]) / (12.0 * h)
    return dv / grid


def power_law_exponent(r1: float, v1: float, r2: float, v2: float) -> Optional[float]:
    """Local log-log slope between two positive samples, None if undefined"""
    if v1 <= 0 or v2 <= 0 or r1 <= 0 or r2 <= 0 or r1 == r2:
        return None
    return float(np.log(v2 / v1) / np.log(r2 / r1))


def radial_mass(grid: np.ndarray, values: np.ndarray, d: int) -> float:
    """
    ∫ v(|x|) dx over R^d for a tabulated radial function

    Simpson's rule in log r on the grid, plus power-law head and tail
    corrections outside the tabulated range.

    Returns:
        Total mass (inf when the extrapolated tail is not integrable)
    """
    grid = np.asarray(grid, dtype=float)
    v = np.asarray(values, dtype=float)
    omega = unit_sphere_area(d)
    u = np.log(grid)
    body = omega * simpson(v * grid ** d, x=u)

    head = 0.0
    if v[0] != 0.0:
        kappa = power_law_exponent(grid[0], v[0], grid[1], v[1])
        kappa = 0.0 if kappa is None else kappa
        if kappa <= -d:
            return float('inf')
        head = omega * v[0] * grid[0] ** d / (d + kappa)

    tail = 0.0
    if v[-1] != 0.0:
        kappa = power_law_exponent(grid[-2], v[-2], grid[-1], v[-1])
        if kappa is None or kappa >= -d:
            logger.debug(f"radial_mass: non-integrable tail (slope {kappa})")
            return float('inf')
        tail = omega * v[-1] * grid[-1] ** d / (-kappa - d)

    return float(body + head + tail)


def fit_log_slope(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """
    Least-squares slope and intercept of log|y| against log x

    Returns:
        Tuple of (slope, intercept)
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    mask = (x > 0) & (y > 0) & np.isfinite(y)
    if mask.sum() < 2:
        return float('nan'), float('nan')
    slope, intercept = np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)
    return float(slope), float(intercept)
