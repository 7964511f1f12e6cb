"""
Sampling
Subordinator increments, subordinate Brownian skeletons, first exits from
balls, harmonic evaluation and Ikeda-Watanabe cross-checks
"""

from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, stats
from scipy.special import comb

import config
from config import logger
from errors import NumericBudgetError, PreconditionError, UnsupportedRouteError
from models.process import Ball, ProcessSpec
from models.reports import BoundReport
from models.samples import ExitSamples, HarmonicEstimate, PathConfig, reflect
from modules import symbols
from modules.symbols import LaplaceExponent
from services import stable_ball
from services.rng import block_generator, map_blocks
from utils.validators import validate_point_in_ball

# Stream tags: one per independent use of a (seed, block) key
STREAM_EXIT = 0
STREAM_CONTINUATION = 1
STREAM_LAPLACE = 2
STREAM_ADDITIVITY = 3
STREAM_BRIDGE = 4

# Terms of the Euler Laplace-inversion sum
_EULER_INVERSION_M = 15


# ================================================
# SUBORDINATORS
# ================================================

def _stable_subordinator(rng: np.random.Generator, a: float, t: float, size: int) -> np.ndarray:
    """One-sided a-stable increments with E e^{-λS_t} = e^{-tλ^a} (Kanter's representation)"""
    u = rng.uniform(0.0, np.pi, size)
    e = rng.standard_exponential(size)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        s = (np.sin(a * u) / np.sin(u) ** (1.0 / a)) * (np.sin((1.0 - a) * u) / e) ** ((1.0 - a) / a)
    return t ** (1.0 / a) * np.nan_to_num(s, nan=0.0, posinf=np.finfo(float).max)


def _relativistic_subordinator(rng: np.random.Generator, m: float, t: float, size: int,
                               depth: int = 0) -> np.ndarray:
    """
    ½-stable increments tilted by e^{-m²s}, by rejection

    Paths still pending after the rejection budget are rebuilt from two
    independent halves of the time step.
    """
    if m == 0.0:
        return _stable_subordinator(rng, 0.5, t, size)
    out = np.empty(size)
    pending = np.arange(size)
    for _ in range(config.TILT_REJECTION_BUDGET):
        if pending.size == 0:
            break
        candidate = _stable_subordinator(rng, 0.5, t, pending.size)
        accept = rng.uniform(size=pending.size) < np.exp(-m * m * candidate)
        out[pending[accept]] = candidate[accept]
        pending = pending[~accept]
    if pending.size:
        if depth >= 40:
            raise NumericBudgetError("tilted sampler failed to accept after repeated time splitting",
                                     {'t': t, 'm': m})
        logger.debug(f"tilted sampler: {pending.size} pending at t={t:g}, splitting")
        out[pending] = (_relativistic_subordinator(rng, m, 0.5 * t, pending.size, depth + 1)
                        + _relativistic_subordinator(rng, m, 0.5 * t, pending.size, depth + 1))
    return out


def _euler_weights(M: int) -> Tuple[np.ndarray, np.ndarray]:
    xi = np.zeros(2 * M + 1)
    xi[0] = 0.5
    xi[1:M + 1] = 1.0
    xi[2 * M] = 2.0 ** -M
    for k in range(1, M):
        xi[2 * M - k] = xi[2 * M - k + 1] + 2.0 ** -M * comb(M, k, exact=False)
    k = np.arange(2 * M + 1)
    eta = (-1.0) ** k * 10.0 ** (M / 3.0) * xi
    beta = M * np.log(10.0) / 3.0 + 1j * np.pi * k
    return eta, beta


@lru_cache(maxsize=64)
def _conjugate_vg_table(t: float, points: int = 600) -> Tuple[np.ndarray, np.ndarray]:
    """
    CDF of S_t for φ(λ) = λ/log(1+λ) - 1 on a log grid

    The Laplace transform e^{-tφ(λ)}/λ of the CDF is inverted with the Euler
    algorithm (complex φ through log1p); the table is clipped to [0, 1] and
    made nondecreasing.
    """
    eta, beta = _euler_weights(_EULER_INVERSION_M)
    upper = 0.5 * t + 40.0 * np.sqrt(t / 6.0) + 40.0
    x = np.geomspace(1e-14, upper, points)
    lam = beta[None, :] / x[:, None]
    with np.errstate(all='ignore'):
        phi = lam / np.log1p(lam) - 1.0
        transform = np.exp(-t * phi) / lam
    cdf = np.sum(eta[None, :] * transform.real, axis=1) / x
    cdf = np.maximum.accumulate(np.clip(np.nan_to_num(cdf, nan=0.0), 0.0, 1.0))
    logger.debug(f"conjugate VG CDF table at t={t:g}: F(max)={cdf[-1]:.8f}")
    return x, cdf


def _conjugate_vg_subordinator(rng: np.random.Generator, t: float, size: int) -> np.ndarray:
    x, cdf = _conjugate_vg_table(float(t))
    u = rng.uniform(size=size) * cdf[-1]
    out = np.interp(u, cdf, np.log(x))
    below = u < cdf[0]
    samples = np.exp(out)
    if cdf[0] > 0:
        samples[below] = x[0] * u[below] / cdf[0]
    return samples


def sample_subordinator(phi: LaplaceExponent, t: float, rng: np.random.Generator,
                        size: Optional[int] = None) -> np.ndarray:
    """
    Increments S_t of the subordinator with Laplace exponent φ

    Args:
        phi: Laplace exponent (stable, gamma, relativistic, geometric_stable, conjugate_vg)
        t: Time increment (> 0)
        rng: Generator the draws come from
        size: Number of independent increments (scalar when None)

    Returns:
        Nonnegative increments; the conjugate VG route is a numeric inverse CDF
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    n = 1 if size is None else int(size)
    if phi.kind == 'stable':
        out = _stable_subordinator(rng, phi.index, t, n)
    elif phi.kind == 'gamma':
        out = rng.gamma(shape=t, scale=1.0, size=n)
    elif phi.kind == 'relativistic':
        out = _relativistic_subordinator(rng, phi.param('m'), t, n)
    elif phi.kind == 'geometric_stable':
        clock = rng.gamma(shape=t, scale=1.0, size=n)
        b = phi.index
        out = clock if b == 1.0 else clock ** (1.0 / b) * _stable_subordinator(rng, b, 1.0, n)
    elif phi.kind == 'conjugate_vg':
        out = _conjugate_vg_subordinator(rng, t, n)
    else:
        raise UnsupportedRouteError(f"no sampler for subordinator kind '{phi.kind}'")
    return out if size is not None else float(out[0])


def laplace_transform_test(phi: LaplaceExponent, t: float, lam: float, n: int,
                           seed: int = config.DEFAULT_SEED) -> Dict[str, float]:
    """Monte Carlo E e^{-λS_t} against e^{-tφ(λ)}; passes within 3 standard errors"""
    draws = np.concatenate(map_blocks(lambda rng, block, size: sample_subordinator(phi, t, rng, size),
                                      n, seed, stream=STREAM_LAPLACE))
    terms = np.exp(-lam * draws)
    estimate = float(np.mean(terms))
    stderr = float(np.std(terms, ddof=1) / np.sqrt(n))
    expected = float(np.exp(-t * phi(lam)))
    z = abs(estimate - expected) / stderr if stderr > 0 else float('inf')
    logger.info(f"Laplace test {phi} t={t:g} λ={lam:g}: {estimate:.6f} vs {expected:.6f} (z={z:.2f})")
    return {'estimate': estimate, 'stderr': stderr, 'expected': expected, 'z': z, 'passed': z <= 3.0}


def additivity_test(phi: LaplaceExponent, t: float, n: int, seed: int = config.DEFAULT_SEED,
                    level: float = 0.01) -> Dict[str, float]:
    """Two-sample KS test of S_t + S'_t against S_{2t}"""
    def block(rng, _, size):
        pair = sample_subordinator(phi, t, rng, size) + sample_subordinator(phi, t, rng, size)
        return pair, sample_subordinator(phi, 2.0 * t, rng, size)

    parts = map_blocks(block, n, seed, stream=STREAM_ADDITIVITY)
    summed = np.concatenate([p[0] for p in parts])
    direct = np.concatenate([p[1] for p in parts])
    result = stats.ks_2samp(summed, direct)
    logger.info(f"Additivity test {phi} t={t:g}: KS={result.statistic:.4g} p={result.pvalue:.4g}")
    return {'statistic': float(result.statistic), 'pvalue': float(result.pvalue),
            'passed': bool(result.pvalue >= level)}


# ================================================
# EXIT TIMES
# ================================================

def _require_sampling_route(spec: ProcessSpec) -> LaplaceExponent:
    if not spec.is_subordinate:
        raise UnsupportedRouteError(f"{spec.label}: path sampling needs a subordinate Brownian motion",
                                    {'kind': spec.kind})
    return symbols.laplace_exponent(spec)


def _bisect_exit(phi: LaplaceExponent, ball: Ball, t_lo: np.ndarray, x_lo: np.ndarray, x_hi: np.ndarray,
                 ds: np.ndarray, dt: float, depth: int, rng: np.random.Generator):
    """
    Halve each crossing step depth times, keeping the half that holds the crossing

    The subordinator midpoint splits ds in the ratio of two independent half-step
    increments (exact for the gamma subordinator); given it, the Brownian midpoint
    is a Brownian bridge draw. A midpoint outside the ball becomes the new exit point.
    """
    t_lo, x_lo, x_hi, s = t_lo.copy(), x_lo.copy(), x_hi.copy(), ds.copy()
    width = dt
    m, d = x_lo.shape
    for _ in range(depth):
        width *= 0.5
        a = sample_subordinator(phi, width, rng, m)
        b = sample_subordinator(phi, width, rng, m)
        total = a + b
        frac = np.where(total > 0, a / np.where(total > 0, total, 1.0), 0.5)
        spread = np.sqrt(np.maximum(2.0 * s * frac * (1.0 - frac), 0.0))
        x_mid = x_lo + frac[:, None] * (x_hi - x_lo) + spread[:, None] * rng.standard_normal((m, d))
        left = ~ball.contains(x_mid)
        x_hi = np.where(left[:, None], x_mid, x_hi)
        x_lo = np.where(left[:, None], x_lo, x_mid)
        t_lo = np.where(left, t_lo, t_lo + width)
        s = np.where(left, frac * s, (1.0 - frac) * s)
    return t_lo, t_lo + width, x_lo, x_hi


def _walk(phi: LaplaceExponent, ball: Ball, starts: np.ndarray, dt: float, max_time: float,
          rng: np.random.Generator, visit: Optional[Callable[[np.ndarray, np.ndarray], None]] = None,
          refinement: int = 0, bridge_rng: Optional[np.random.Generator] = None):
    """
    Skeleton walk X_{kΔt} = B_{S_{kΔt}} from each start until the first point outside the ball

    visit(indices, positions) sees the alive paths at every skeleton time before
    they move (left-point occupation). With refinement > 0 the crossing step of
    every exited path is bisected on bridge_rng, so the exit bracket narrows to
    Δt/2^refinement; the skeleton itself does not depend on the refinement.
    """
    size, d = starts.shape
    pos = starts.copy()
    alive = np.ones(size, dtype=bool)
    tau = np.full(size, float(max_time))
    tau_lower = np.full(size, float(max_time))
    x_pre = starts.copy()
    x_exit = starts.copy()
    steps = int(np.ceil(max_time / dt))
    idx = np.arange(size)
    for k in range(1, steps + 1):
        if idx.size == 0:
            break
        if visit is not None:
            visit(idx, pos[idx])
        ds = sample_subordinator(phi, dt, rng, idx.size)
        moved = pos[idx] + np.sqrt(2.0 * ds)[:, None] * rng.standard_normal((idx.size, d))
        out = ~ball.contains(moved)
        done = idx[out]
        if refinement > 0 and done.size:
            lo, hi, before, after = _bisect_exit(phi, ball, np.full(done.size, (k - 1) * dt), pos[done],
                                                 moved[out], ds[out], dt, refinement, bridge_rng)
            tau[done], tau_lower[done] = hi, lo
            x_pre[done], x_exit[done] = before, after
        else:
            tau[done] = k * dt
            tau_lower[done] = (k - 1) * dt
            x_pre[done] = pos[done]
            x_exit[done] = moved[out]
        pos[idx] = moved
        alive[done] = False
        idx = idx[~out]
    return tau, tau_lower, x_pre, x_exit, alive


def sample_exit(spec: ProcessSpec, ball: Ball, x0: Sequence[float], cfg: PathConfig = PathConfig(),
                stream: int = STREAM_EXIT) -> ExitSamples:
    """
    First exits of cfg.n_paths skeleton paths started at x0

    Args:
        spec: Subordinate Brownian motion spec
        ball: Domain (ball or annulus)
        x0: Starting point in the closure of the domain
        cfg: Path configuration (seed, dt, horizon, paths, exit-bracket bisection depth)

    Returns:
        ExitSamples with exit brackets of width dt/2^refinement; paths still
        inside at the horizon are censored

    Raises:
        UnsupportedRouteError: spec is not a subordinate Brownian motion
        PreconditionError: x0 outside the closed domain
    """
    phi = _require_sampling_route(spec)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    d = ball.dimension
    if x0.size != d or spec.dimension != d:
        raise PreconditionError(f"x0 and the ball must live in R^{spec.dimension}",
                                {'x0': x0.tolist(), 'ball_dimension': d})

    n = cfg.n_paths
    if abs(ball.distance_to_boundary(x0)) <= 1e-12:
        # started on the boundary: exits immediately, bracket [0, Δt]
        logger.info(f"{spec.label}: x0 on the boundary of {ball}, τ bracket [0, {cfg.dt:g}]")
        tile = np.tile(x0, (n, 1))
        return ExitSamples(tau=np.full(n, cfg.dt), tau_lower=np.zeros(n), x_pre=tile, x_exit=tile.copy(),
                           censored=np.zeros(n, dtype=bool), domain=ball, dt=cfg.dt, seed=cfg.seed)
    is_valid, error = validate_point_in_ball(ball, x0)
    if not is_valid:
        raise PreconditionError(error, {'x0': x0.tolist()})

    def block(rng, index, size):
        bridge = block_generator(cfg.seed, index, STREAM_BRIDGE + stream) if cfg.refinement else None
        return _walk(phi, ball, np.tile(x0, (size, 1)), cfg.dt, cfg.max_time, rng,
                     refinement=cfg.refinement, bridge_rng=bridge)

    parts = map_blocks(block, n, cfg.seed, cfg.block_size, cfg.workers, stream)
    samples = ExitSamples(
        tau=np.concatenate([p[0] for p in parts]),
        tau_lower=np.concatenate([p[1] for p in parts]),
        x_pre=np.concatenate([p[2] for p in parts]),
        x_exit=np.concatenate([p[3] for p in parts]),
        censored=np.concatenate([p[4] for p in parts]),
        domain=ball, dt=cfg.dt, seed=cfg.seed,
    )
    if samples.censored_fraction > 0:
        logger.warning(f"{spec.label}: {samples.censored_fraction:.2%} of paths censored at "
                       f"t={cfg.max_time:g}; conditional statistics are biased")
    if samples.censored_fraction > config.CENSOR_LIMIT:
        logger.warning(f"{spec.label}: censoring above the {config.CENSOR_LIMIT:.1%} limit")
    return samples


def exit_time_mean(spec: ProcessSpec, ball: Ball, x0: Sequence[float],
                   cfg: PathConfig = PathConfig()) -> HarmonicEstimate:
    """
    E^x τ_B with the time-step bias loop

    dt is halved (up to cfg.refinement times) until the mean moves by less than
    one standard error.
    """
    levels: List[Dict[str, float]] = []
    current = cfg
    previous: Optional[HarmonicEstimate] = None
    for level in range(cfg.refinement + 1):
        samples = sample_exit(spec, ball, x0, current)
        estimate = HarmonicEstimate.from_terms(samples.tau[samples.exited], samples.censored_fraction, cfg.seed)
        levels.append({'dt': current.dt, 'estimate': estimate.value, 'stderr': estimate.stderr})
        if previous is not None and abs(estimate.value - previous.value) < estimate.stderr:
            break
        previous = estimate
        if level < cfg.refinement:
            current = current.halved()
    estimate.notes = {'quantity': 'exit_time', 'dt': current.dt, 'levels': levels}
    logger.info(f"{spec.label}: E τ at {tuple(np.atleast_1d(x0))} = {estimate}")
    return estimate


# ================================================
# HARMONIC FUNCTIONS
# ================================================

def harmonic_eval(spec: ProcessSpec, ball: Ball, boundary_f: Callable[[np.ndarray], np.ndarray],
                  x0: Sequence[float], cfg: PathConfig = PathConfig(), check_mean_value: bool = True,
                  samples: Optional[ExitSamples] = None) -> HarmonicEstimate:
    """
    f(x0) = E^{x0} f(X(τ_B)) by Monte Carlo

    Args:
        boundary_f: Vectorized exterior data, called on an (n, d) array of exit points
        check_mean_value: Re-estimate through a smaller concentric ball (independent
            continuation stream) and record whether both agree within 3 combined stderr
        samples: Reuse exit samples drawn for the same (ball, x0, cfg)

    Returns:
        HarmonicEstimate; heavy_tail is set when one term exceeds 10% of the sum
    """
    samples = samples or sample_exit(spec, ball, x0, cfg)
    terms = np.asarray(boundary_f(samples.x_exit[samples.exited]), dtype=float)
    estimate = HarmonicEstimate.from_terms(terms, samples.censored_fraction, cfg.seed)
    if estimate.heavy_tail:
        logger.warning(f"{spec.label}: heavy-tailed harmonic estimate at {tuple(np.atleast_1d(x0))}")
    if check_mean_value and not ball.is_annulus:
        inner = _mean_value_estimate(spec, ball, boundary_f, np.asarray(x0, dtype=float), cfg)
        combined = np.hypot(estimate.stderr, inner.stderr)
        estimate.mean_value_agrees = bool(abs(estimate.value - inner.value) <= 3.0 * combined + 1e-15)
        estimate.notes['mean_value'] = inner.value
        estimate.notes['mean_value_stderr'] = inner.stderr
    return estimate


def _mean_value_estimate(spec: ProcessSpec, ball: Ball, boundary_f: Callable, x0: np.ndarray,
                         cfg: PathConfig) -> HarmonicEstimate:
    """E^{x0} f(X(τ_B)) by exiting a smaller concentric ball first, then continuing to τ_B"""
    phi = symbols.laplace_exponent(spec)
    center = np.asarray(ball.center)
    inner_radius = 0.5 * (float(np.linalg.norm(x0 - center)) + ball.radius)
    inner = Ball(center=ball.center, radius=inner_radius)
    first = sample_exit(spec, inner, x0, cfg, stream=STREAM_CONTINUATION)
    landed = first.x_exit[first.exited]
    inside = ball.contains(landed)
    finals = landed.copy()
    keep = np.ones(landed.shape[0], dtype=bool)
    if inside.any():
        # paths that landed between the two spheres continue on their own stream
        rng = block_generator(cfg.seed, 0, STREAM_CONTINUATION + 8)
        _, _, _, x_exit, alive = _walk(phi, ball, landed[inside], cfg.dt, cfg.max_time, rng)
        finals[inside] = x_exit
        keep[np.nonzero(inside)[0][alive]] = False
    return HarmonicEstimate.from_terms(np.asarray(boundary_f(finals[keep]), dtype=float),
                                       first.censored_fraction, cfg.seed)


def harmonic_difference(spec: ProcessSpec, ball: Ball, boundary_f: Callable[[np.ndarray], np.ndarray],
                        x: Sequence[float], cfg: PathConfig = PathConfig(),
                        samples: Optional[ExitSamples] = None) -> HarmonicEstimate:
    """
    f(x) - f(x̂) by mirror coupling for a ball centred at the origin

    E^x f(X_τ) - E^{x̂} f(X_τ) = E^x[f(X_τ) - f(\\hat{X_τ})], one set of paths
    """
    if any(c != 0.0 for c in ball.center):
        raise PreconditionError("mirror coupling needs a ball centred at the origin")
    samples = samples or sample_exit(spec, ball, x, cfg)
    exits = samples.x_exit[samples.exited]
    mirrored = exits.copy()
    mirrored[:, 0] = -mirrored[:, 0]
    terms = np.asarray(boundary_f(exits), dtype=float) - np.asarray(boundary_f(mirrored), dtype=float)
    estimate = HarmonicEstimate.from_terms(terms, samples.censored_fraction, cfg.seed)
    estimate.notes = {'quantity': 'reflection_difference', 'x': list(np.atleast_1d(x)),
                      'x_hat': list(reflect(x))}
    return estimate


# ================================================
# CROSS-CHECKS
# ================================================

def box_indicator(lower: Sequence[float], upper: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    """Indicator of the open box Π (lower_i, upper_i), vectorized over (n, d) rows"""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)

    def indicator(z):
        z = np.atleast_2d(z)
        return np.all((z > lo) & (z < hi), axis=1).astype(float)
    return indicator


def ikeda_watanabe_probability(spec: ProcessSpec, ball: Ball, lower: Sequence[float],
                               upper: Sequence[float], x0: Sequence[float],
                               cfg: PathConfig = PathConfig()) -> float:
    """
    P^x(X(τ_B) ∈ A) = ∫_A ∫_B G_B(x, y) ν(y - z) dy dz for a box A away from the ball

    d = 1 by double quadrature with G_B from the closed form (stable) or from
    the occupation density of cfg's paths; d = 2 stable specs through the ball
    Poisson kernel.
    """
    from modules.levy_measures import levy_density

    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(upper <= lower):
        return 0.0
    d = spec.dimension
    alpha = spec.stability_index
    center = np.asarray(ball.center, dtype=float)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    shifted = x0 - center
    if d == 2 and alpha is not None:
        return stable_ball.harmonic_measure_box(alpha, 2, ball.radius, shifted, lower - center, upper - center)
    if d != 1:
        raise UnsupportedRouteError(f"no Green-function route for {spec.label} in d={d}")

    nu = levy_density(spec)
    c = float(center[0])
    r = ball.radius
    if alpha is not None:
        def green(y):
            return float(stable_ball.green_function(alpha, 1, r, [shifted[0]], [y - c]))
    else:
        table = occupation_green(spec, ball, x0, np.linspace(c - r, c + r, 201), cfg)

        def green(y):
            return float(np.interp(y, table['centers'], table['value']))

    def jump_mass(y):
        return integrate.quad(lambda z: float(nu(abs(z - y))), lower[0], upper[0], limit=200)[0]

    points = [x0[0]] if c - r < x0[0] < c + r else None
    value = integrate.quad(lambda y: green(y) * jump_mass(y), c - r, c + r, points=points,
                           limit=400, epsabs=1e-12, epsrel=1e-8)[0]
    return float(value)


def ikeda_watanabe_check(spec: ProcessSpec, ball: Ball, lower: Sequence[float], upper: Sequence[float],
                         x0: Sequence[float], cfg: PathConfig = PathConfig(),
                         samples: Optional[ExitSamples] = None) -> BoundReport:
    """
    Monte Carlo exit frequency in a far box against the Ikeda-Watanabe double integral

    Passes when |MC - quadrature| ≤ 3 stderr. The complement sum
    P(A) + P(A^c ∩ B^c) is recorded in details.
    """
    samples = samples or sample_exit(spec, ball, x0, cfg)
    hits = box_indicator(lower, upper)(samples.x_exit[samples.exited])
    mc = HarmonicEstimate.from_terms(hits, samples.censored_fraction, cfg.seed)
    quadrature = ikeda_watanabe_probability(spec, ball, lower, upper, x0, cfg.with_seed(cfg.seed + 1))
    complement = float(np.mean(1.0 - hits)) if hits.size else 0.0
    report = BoundReport(name='ikeda_watanabe', points=[{'x0': float(np.atleast_1d(x0)[0])}],
                         lhs=np.array([abs(mc.value - quadrature)]), rhs=np.array([3.0 * mc.stderr]),
                         fit_mode='fixed_constant', tolerance=0.0, spec_id=spec.label,
                         details={'mc': mc.value, 'stderr': mc.stderr, 'quadrature': quadrature,
                                  'complement_sum': mc.value + complement})
    logger.info(f"{spec.label}: IW MC {mc} vs quadrature {quadrature:.6g}")
    return report


def exit_position_chi2(spec: ProcessSpec, ball: Ball, x0: Sequence[float], samples: ExitSamples,
                       bins: int = 16, level: float = 0.01) -> Dict[str, float]:
    """
    χ² test of d = 1 stable exit positions against the ball harmonic measure

    Bins are geometric in the distance beyond the boundary on both sides;
    bins with expected count below 5 are merged outward.
    """
    alpha = spec.stability_index
    if alpha is None or spec.dimension != 1:
        raise UnsupportedRouteError("exit-position χ² test needs a stable spec in d = 1")
    r = ball.radius
    c = ball.center[0]
    exits = samples.x_exit[samples.exited][:, 0] - c
    offsets = np.concatenate([[0.0], r * np.geomspace(1e-3, 1e3, bins - 1), [np.inf]])
    start_shifted = float(np.atleast_1d(x0)[0]) - c

    def mass(a, b):
        return integrate.quad(lambda z: float(stable_ball.poisson_kernel(alpha, 1, r, [start_shifted], [[z]])[0]),
                              a, b, limit=200)[0]

    expected, observed = [], []
    for side in (1.0, -1.0):
        for a, b in zip(offsets[:-1], offsets[1:]):
            lo, hi = r + a, r + b
            expected.append(mass(lo, hi) if side > 0 else mass(-hi, -lo))
            dist = side * exits
            observed.append(int(np.sum((dist > lo) & (dist <= hi))))
    expected = np.array(expected) * exits.size
    observed = np.array(observed, dtype=float)
    merged_e, merged_o = [], []
    acc_e = acc_o = 0.0
    for e, o in zip(expected, observed):
        acc_e += e
        acc_o += o
        if acc_e >= 5.0:
            merged_e.append(acc_e)
            merged_o.append(acc_o)
            acc_e = acc_o = 0.0
    if merged_e:
        merged_e[-1] += acc_e
        merged_o[-1] += acc_o
    merged_e = np.array(merged_e)
    merged_o = np.array(merged_o)
    merged_e *= merged_o.sum() / merged_e.sum()
    result = stats.chisquare(merged_o, merged_e)
    return {'statistic': float(result.statistic), 'pvalue': float(result.pvalue),
            'bins': int(merged_e.size), 'passed': bool(result.pvalue >= level)}


def check_exit_sandwich(spec: ProcessSpec, radii: Sequence[float] = (0.25, 1.0),
                        fractions: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 0.9),
                        cfg: PathConfig = PathConfig()) -> Tuple[BoundReport, BoundReport]:
    """
    E^x τ_{B(0,r)} ≤ C₁ L(r) L(δ(x)) and C₂ L²(r) ≤ E^x τ for |x| ≤ r/2

    Returns:
        (upper report with C₁ fitted, lower report whose fitted constant is 1/C₂)
    """
    d = spec.dimension
    upper_lhs, upper_rhs, upper_points = [], [], []
    lower_lhs, lower_rhs, lower_points = [], [], []
    for r in radii:
        ball = Ball.centered(d, r)
        L_r = float(symbols.scale_L(spec, r))
        for q in fractions:
            x = np.zeros(d)
            x[0] = q * r
            estimate = exit_time_mean(spec, ball, x, cfg)
            delta = r - q * r
            point = {'r': r, 'x1': q * r, 'mean': estimate.value, 'stderr': estimate.stderr}
            upper_lhs.append(estimate.value)
            upper_rhs.append(L_r * float(symbols.scale_L(spec, delta)))
            upper_points.append(point)
            if q <= 0.5:
                lower_lhs.append(L_r * L_r)
                lower_rhs.append(estimate.value)
                lower_points.append(point)
    upper = BoundReport(name='exit_upper', points=upper_points, lhs=np.array(upper_lhs),
                        rhs=np.array(upper_rhs), fit_mode='fit_constant', spec_id=spec.label)
    lower = BoundReport(name='exit_lower', points=lower_points, lhs=np.array(lower_lhs),
                        rhs=np.array(lower_rhs), fit_mode='fit_constant', spec_id=spec.label)
    upper.details['C1'] = upper.constant
    lower.details['C2'] = 1.0 / lower.constant if lower.constant > 0 else float('inf')
    logger.info(f"{spec.label}: {upper}; {lower}")
    return upper, lower


def check_ubhp(spec: ProcessSpec, s: float = 1.0, fractions: Sequence[float] = (0.0, 0.2, 0.4),
               domain_fraction: float = 0.75, cfg: PathConfig = PathConfig()) -> BoundReport:
    """
    P^y(X(τ_D) ∈ B^c(z, s)) ≤ c E^y τ_D / L²(s) for D = B(z, domain_fraction·s), z = 0

    The fitted constant is the max ratio over y = q·s·e₁ with q < 1/2.
    """
    d = spec.dimension
    domain = Ball.centered(d, domain_fraction * s)
    L_s = float(symbols.scale_L(spec, s))
    lhs, rhs, points = [], [], []
    for q in fractions:
        y = np.zeros(d)
        y[0] = q * s
        samples = sample_exit(spec, domain, y, cfg)
        exits = samples.x_exit[samples.exited]
        far = (np.linalg.norm(exits, axis=1) >= s).astype(float)
        probability = HarmonicEstimate.from_terms(far, samples.censored_fraction, cfg.seed)
        mean_tau = float(np.mean(samples.tau[samples.exited]))
        lhs.append(probability.value)
        rhs.append(mean_tau / (L_s * L_s))
        points.append({'y1': q * s, 'probability': probability.value, 'stderr': probability.stderr,
                       'mean_tau': mean_tau})
    report = BoundReport(name='ubhp', points=points, lhs=np.array(lhs), rhs=np.array(rhs),
                         fit_mode='fit_constant', spec_id=spec.label)
    logger.info(f"{spec.label}: {report}")
    return report


def occupation_green(spec: ProcessSpec, ball: Ball, x: Sequence[float], edges,
                     cfg: PathConfig = PathConfig()) -> Dict[str, np.ndarray]:
    """
    Occupation density of paths from x before leaving the ball, an estimate of G_B(x, ·)

    Args:
        edges: Bin edges (d = 1) or a pair of edge arrays (d = 2)

    Returns:
        dict with 'centers', 'value' (density per unit volume) and 'stderr'
    """
    phi = _require_sampling_route(spec)
    d = ball.dimension
    if d not in (1, 2):
        raise UnsupportedRouteError("occupation densities are tabulated for d = 1 or 2 only")
    x = np.asarray(x, dtype=float).reshape(-1)
    if d == 1:
        edge_list = [np.asarray(edges, dtype=float)]
    else:
        edge_list = [np.asarray(e, dtype=float) for e in edges]
    shape = tuple(e.size - 1 for e in edge_list)
    volume = np.prod(np.meshgrid(*[np.diff(e) for e in edge_list], indexing='ij'), axis=0)

    def block(rng, _, size):
        counts = np.zeros((size,) + shape)

        def visit(idx, pos):
            cells = [np.searchsorted(e, pos[:, k], side='right') - 1 for k, e in enumerate(edge_list)]
            ok = np.all([(c >= 0) & (c < n) for c, n in zip(cells, shape)], axis=0)
            np.add.at(counts, (idx[ok],) + tuple(c[ok] for c in cells), cfg.dt)

        _walk(phi, ball, np.tile(x, (size, 1)), cfg.dt, cfg.max_time, rng, visit)
        return counts.sum(axis=0), (counts ** 2).sum(axis=0)

    parts = map_blocks(block, cfg.n_paths, cfg.seed, cfg.block_size, cfg.workers, STREAM_EXIT)
    total = sum(p[0] for p in parts)
    squares = sum(p[1] for p in parts)
    n = cfg.n_paths
    mean = total / n
    var = np.maximum(squares / n - mean ** 2, 0.0)
    centers = [0.5 * (e[:-1] + e[1:]) for e in edge_list]
    return {'centers': centers[0] if d == 1 else centers, 'value': mean / volume,
            'stderr': np.sqrt(var / n) / volume}


def occupation_integrals(spec: ProcessSpec, ball: Ball, x: Sequence[float],
                         functionals: Sequence[Callable[[np.ndarray], np.ndarray]],
                         cfg: PathConfig = PathConfig()) -> List[HarmonicEstimate]:
    """
    E^x ∫_0^τ F(X_s) ds = ∫_B G_B(x, y) F(y) dy for each F, from one set of paths

    Args:
        functionals: Vectorized F, called on (n, d) arrays of skeleton positions

    Returns:
        One HarmonicEstimate per functional (per-path integrals as terms)
    """
    phi = _require_sampling_route(spec)
    x = np.asarray(x, dtype=float).reshape(-1)
    is_valid, error = validate_point_in_ball(ball, x)
    if not is_valid:
        raise PreconditionError(error, {'x': x.tolist()})

    def block(rng, _, size):
        totals = np.zeros((len(functionals), size))

        def visit(idx, pos):
            for k, fn in enumerate(functionals):
                totals[k, idx] += cfg.dt * np.asarray(fn(pos), dtype=float)

        *_, alive = _walk(phi, ball, np.tile(x, (size, 1)), cfg.dt, cfg.max_time, rng, visit)
        return totals, alive

    parts = map_blocks(block, cfg.n_paths, cfg.seed, cfg.block_size, cfg.workers, STREAM_EXIT)
    totals = np.concatenate([p[0] for p in parts], axis=1)
    censored = float(np.mean(np.concatenate([p[1] for p in parts])))
    if censored > 0:
        logger.warning(f"{spec.label}: {censored:.2%} of occupation paths censored at t={cfg.max_time:g}")
    return [HarmonicEstimate.from_terms(row, censored, cfg.seed) for row in totals]
