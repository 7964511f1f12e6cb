"""
Closed forms for the isotropic α-stable process on balls
ψ(ξ) = |ξ|^α, Lévy density A_{d,α}|x|^{-d-α}
"""

from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import beta as beta_fn
from scipy.special import betainc, gammaln

from config import logger


def _check(alpha: float, d: int) -> None:
    if not 0 < alpha < 2:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")


def stable_constant(d: int, alpha: float) -> float:
    """A_{d,α} = α 2^{α-1} Γ((d+α)/2) / (π^{d/2} Γ(1-α/2))"""
    _check(alpha, d)
    log_value = (np.log(alpha) + (alpha - 1.0) * np.log(2.0) + gammaln(0.5 * (d + alpha))
                 - 0.5 * d * np.log(np.pi) - gammaln(1.0 - 0.5 * alpha))
    return float(np.exp(log_value))


def cauchy_density(d: int, t, r):
    """p_t(r) = Γ((d+1)/2) π^{-(d+1)/2} t / (t² + r²)^{(d+1)/2}"""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    const = np.exp(gammaln(0.5 * (d + 1)) - 0.5 * (d + 1) * np.log(np.pi))
    return const * t / (t * t + r * r) ** (0.5 * (d + 1))


def riesz_constant(d: int, alpha: float) -> float:
    """U(r) = C r^{α-d} for the stable potential kernel (d > α)"""
    _check(alpha, d)
    if d <= alpha:
        raise ValueError(f"Riesz kernel needs d > alpha, got d={d}, alpha={alpha}")
    log_value = (gammaln(0.5 * (d - alpha)) - alpha * np.log(2.0) - 0.5 * d * np.log(np.pi)
                 - gammaln(0.5 * alpha))
    return float(np.exp(log_value))


def exit_time_mean(alpha: float, d: int, radius: float, x) -> np.ndarray:
    """
    E^x τ_{B(0,r)} = Γ(d/2)(r² - |x|²)^{α/2} / (2^α Γ(1+α/2) Γ((d+α)/2))

    Args:
        x: Point(s) as an (n, d) array or a single point; norms are used
    """
    _check(alpha, d)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    sq = np.maximum(radius * radius - np.sum(x * x, axis=-1), 0.0)
    log_const = gammaln(0.5 * d) - alpha * np.log(2.0) - gammaln(1.0 + 0.5 * alpha) - gammaln(0.5 * (d + alpha))
    out = np.exp(log_const) * sq ** (0.5 * alpha)
    return out if out.size > 1 else float(out[0])


def poisson_kernel(alpha: float, d: int, radius: float, x, z) -> np.ndarray:
    """
    Density of X(τ_B) under P^x for B = B(0, r), evaluated at |z| > r

    P(x, z) = Γ(d/2) π^{-d/2-1} sin(πα/2) ((r²-|x|²)/(|z|²-r²))^{α/2} |x-z|^{-d}
    """
    _check(alpha, d)
    x = np.asarray(x, dtype=float).reshape(-1)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[-1] != d:
        z = z.reshape(-1, d)
    const = np.exp(gammaln(0.5 * d) - (0.5 * d + 1.0) * np.log(np.pi)) * np.sin(0.5 * np.pi * alpha)
    inner = max(radius * radius - float(x @ x), 0.0)
    outer = np.sum(z * z, axis=-1) - radius * radius
    dist = np.linalg.norm(z - x[None, :], axis=-1)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = const * (inner / outer) ** (0.5 * alpha) * dist ** (-d)
    return np.where(outer > 0, value, 0.0)


def _green_integral(a: float, b: float, w: np.ndarray) -> np.ndarray:
    """∫_0^w s^{a-1}(1+s)^{-b} ds"""
    w = np.asarray(w, dtype=float)
    if b > a:
        zeta = w / (1.0 + w)
        return betainc(a, b - a, zeta) * beta_fn(a, b - a)
    if a == b == 0.5:
        return 2.0 * np.arcsinh(np.sqrt(w))
    out = np.empty_like(w)
    for i, wi in np.ndenumerate(w):
        out[i] = integrate.quad(lambda s: s ** (a - 1.0) * (1.0 + s) ** (-b), 0.0, wi, limit=200)[0]
    return out


def green_function(alpha: float, d: int, radius: float, x, y) -> np.ndarray:
    """
    Green function of B(0, r) for the isotropic α-stable process

    G(x, y) = κ |x-y|^{α-d} ∫_0^w s^{α/2-1}(1+s)^{-d/2} ds with
    κ = Γ(d/2) / (2^α π^{d/2} Γ(α/2)²) and w = (r²-|x|²)(r²-|y|²) / (r²|x-y|²)

    Args:
        x, y: Points (single or (n, d) arrays, broadcast against each other)
    """
    _check(alpha, d)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[-1] != d:
        x = x.reshape(-1, d)
    if y.shape[-1] != d:
        y = y.reshape(-1, d)
    r2 = radius * radius
    dist = np.linalg.norm(x - y, axis=-1)
    sx = np.maximum(r2 - np.sum(x * x, axis=-1), 0.0)
    sy = np.maximum(r2 - np.sum(y * y, axis=-1), 0.0)
    log_kappa = gammaln(0.5 * d) - alpha * np.log(2.0) - 0.5 * d * np.log(np.pi) - 2.0 * gammaln(0.5 * alpha)
    with np.errstate(divide='ignore', invalid='ignore'):
        w = sx * sy / (r2 * dist * dist)
        value = np.exp(log_kappa) * dist ** (alpha - d) * _green_integral(0.5 * alpha, 0.5 * d, w)
    value = np.where((sx > 0) & (sy > 0), value, 0.0)
    value = np.where(dist == 0, np.inf, value)
    return value if value.size > 1 else float(value[0])


def harmonic_measure_box(alpha: float, d: int, radius: float, x, lower: Sequence[float],
                         upper: Sequence[float]) -> float:
    """
    P^x(X(τ_B) ∈ A) for a box A = Π [lower_i, upper_i] outside the closed ball (d ≤ 2)

    Returns:
        Probability by adaptive quadrature of the Poisson kernel
    """
    if d == 1:
        value = integrate.quad(lambda z: float(poisson_kernel(alpha, 1, radius, x, [[z]])[0]),
                               lower[0], upper[0], limit=200, epsabs=1e-13, epsrel=1e-10)[0]
    elif d == 2:
        value = integrate.dblquad(
            lambda z2, z1: float(poisson_kernel(alpha, 2, radius, x, [[z1, z2]])[0]),
            lower[0], upper[0], lower[1], upper[1], epsabs=1e-12, epsrel=1e-9)[0]
    else:
        raise ValueError("harmonic_measure_box supports d = 1 or 2")
    logger.debug(f"harmonic measure at x={tuple(np.atleast_1d(x))}: {value:.6g}")
    return float(value)
