"""
Unit tests for subordinator draws and exit-time sampling
"""
import numpy as np
import pytest

from errors import PreconditionError, UnsupportedRouteError
from models import Ball, PathConfig
from modules import sampling, symbols
from modules.symbols import LaplaceExponent
from services import stable_ball


@pytest.mark.parametrize("phi", [
    LaplaceExponent('stable', (('alpha', 1.0),)),
    LaplaceExponent('gamma'),
    LaplaceExponent('relativistic', (('m', 1.0),)),
    LaplaceExponent('geometric_stable', (('beta', 1.0),)),
])
def test_laplace_transform_matches(phi):
    """E e^{-λS_t} agrees with e^{-tφ(λ)} within three standard errors"""
    result = sampling.laplace_transform_test(phi, t=0.5, lam=1.0, n=20000, seed=11)
    assert result['passed'], result


def test_subordinator_draws_are_reproducible():
    """Same seed, same draws"""
    phi = LaplaceExponent('stable', (('alpha', 1.0),))
    first = sampling.sample_subordinator(phi, 0.1, np.random.default_rng(5), 100)
    second = sampling.sample_subordinator(phi, 0.1, np.random.default_rng(5), 100)
    assert np.array_equal(first, second)
    assert np.all(first >= 0)


def test_subordinator_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        sampling.sample_subordinator(LaplaceExponent('gamma'), 0.0, np.random.default_rng(1))


def test_additivity_of_gamma_subordinator():
    """S_t + S'_t has the law of S_2t"""
    assert sampling.additivity_test(LaplaceExponent('gamma'), 0.3, n=5000, seed=3)['passed']


def test_exit_samples_reproducible(cauchy_spec, small_cfg):
    """Fixed seed gives identical exit samples"""
    ball = Ball.centered(1, 1.0)
    cfg = small_cfg.with_paths(500)
    first = sampling.sample_exit(cauchy_spec, ball, (0.0,), cfg)
    second = sampling.sample_exit(cauchy_spec, ball, (0.0,), cfg)
    assert np.array_equal(first.tau, second.tau)
    assert np.array_equal(first.x_exit, second.x_exit)
    assert np.all(first.tau_lower <= first.tau)
    assert np.all(np.abs(first.x_exit[first.exited]) >= 1.0)


def test_exit_from_outside_is_rejected(cauchy_spec, small_cfg):
    with pytest.raises(PreconditionError):
        sampling.sample_exit(cauchy_spec, Ball.centered(1, 1.0), (1.5,), small_cfg)


def test_exit_on_boundary_is_immediate(cauchy_spec, small_cfg):
    """Boundary starts exit within one step"""
    samples = sampling.sample_exit(cauchy_spec, Ball.centered(1, 1.0), (1.0,), small_cfg.with_paths(10))
    assert np.all(samples.tau_lower == 0.0)
    assert np.all(samples.tau == small_cfg.dt)


def test_exit_needs_subordinate_spec(load_spec, small_cfg):
    with pytest.raises(UnsupportedRouteError):
        sampling.sample_exit(load_spec('truncated_stable_a1_d1'), Ball.centered(1, 1.0), (0.0,), small_cfg)


def test_box_indicator_is_open():
    indicator = sampling.box_indicator((1.0,), (2.0,))
    values = indicator(np.array([[1.0], [1.5], [2.0], [0.5]]))
    assert values.tolist() == [0.0, 1.0, 0.0, 0.0]


@pytest.mark.slow
def test_cauchy_exit_time_mean(cauchy_spec, small_cfg):
    """E^0 τ_{B(0,1)} = 1 for the Cauchy process on the line"""
    estimate = sampling.exit_time_mean(cauchy_spec, Ball.centered(1, 1.0), (0.0,), small_cfg)
    expected = float(stable_ball.exit_time_mean(1.0, 1, 1.0, (0.0,)))
    assert expected == pytest.approx(1.0)
    assert estimate.value == pytest.approx(expected, rel=0.1)


def test_laplace_exponent_for_spec(stable_spec):
    phi = symbols.laplace_exponent(stable_spec)
    assert phi(4.0) == pytest.approx(2.0)


def test_exit_position_chi2_summary(cauchy_spec, small_cfg):
    ball = Ball.centered(1, 1.0)
    samples = sampling.sample_exit(cauchy_spec, ball, (0.0,), small_cfg)
    result = sampling.exit_position_chi2(cauchy_spec, ball, (0.0,), samples)
    assert result['bins'] >= 2
    assert 0.0 <= result['pvalue'] <= 1.0


def test_exit_position_chi2_needs_line(load_spec, small_cfg):
    spec = load_spec('stable_a1_d2')
    ball = Ball.centered(2, 1.0)
    samples = sampling.sample_exit(spec, ball, (0.0, 0.0), small_cfg.with_paths(50))
    with pytest.raises(UnsupportedRouteError):
        sampling.exit_position_chi2(spec, ball, (0.0, 0.0), samples)


@pytest.mark.slow
def test_ubhp_constant_is_finite(cauchy_spec, small_cfg):
    """Far-exit probability is controlled by E τ / L²"""
    report = sampling.check_ubhp(cauchy_spec, cfg=small_cfg)
    assert len(report.points) == 3
    assert report.passed
    assert np.isfinite(report.constant)


def test_harmonic_eval_symmetric_data(cauchy_spec, small_cfg):
    """Exiting to the right from the centre has probability 1/2"""
    estimate = sampling.harmonic_eval(cauchy_spec, Ball.centered(1, 1.0), lambda z: (z[:, 0] > 0).astype(float),
                                      (0.0,), small_cfg)
    assert estimate.value == pytest.approx(0.5, abs=0.05)
    assert 'mean_value' in estimate.notes


def test_exit_event_view(cauchy_spec, small_cfg):
    """Indexing the batch gives one exit event that survives to_dict / from_dict"""
    ball = Ball.centered(1, 1.0)
    samples = sampling.sample_exit(cauchy_spec, ball, (0.2,), small_cfg.with_paths(20))
    event = samples[3]
    assert event.tau == samples.tau[3]
    assert event.tau_lower <= event.tau
    assert event.domain == ball
    if not event.censored:
        assert abs(event.x_exit[0]) >= 1.0
    assert type(event).from_dict(event.to_dict()) == event


def test_integer_horizon_keeps_fractional_exit_times(cauchy_spec):
    """An int max_time must not truncate exit times k·dt to integers"""
    cfg = PathConfig(dt=0.01, max_time=20, seed=3, n_paths=500, refinement=0, block_size=256)
    assert isinstance(cfg.max_time, float)
    samples = sampling.sample_exit(cauchy_spec, Ball.centered(1, 1.0), (0.0,), cfg)
    assert samples.tau.dtype == np.float64
    exited = samples.tau[samples.exited]
    assert np.any(exited % 1.0 != 0.0)
    assert np.mean(exited) > 0.8


def test_exit_bracket_narrows_with_refinement(cauchy_spec):
    """Bisection leaves brackets of width dt/2^depth inside the crossing skeleton step"""
    ball = Ball.centered(1, 1.0)
    plain_cfg = PathConfig(dt=0.01, max_time=20.0, seed=5, n_paths=400, refinement=0, block_size=256)
    refined_cfg = PathConfig(dt=0.01, max_time=20.0, seed=5, n_paths=400, refinement=4, block_size=256)
    plain = sampling.sample_exit(cauchy_spec, ball, (0.3,), plain_cfg)
    refined = sampling.sample_exit(cauchy_spec, ball, (0.3,), refined_cfg)
    mask = refined.exited
    assert np.allclose((plain.tau - plain.tau_lower)[plain.exited], 0.01)
    assert np.all(refined.tau[mask] - refined.tau_lower[mask] <= 0.01 / 16 + 1e-12)
    # same skeleton: the refined bracket sits inside the unrefined crossing step
    assert np.all(refined.tau_lower[mask] >= plain.tau_lower[mask] - 1e-12)
    assert np.all(refined.tau[mask] <= plain.tau[mask] + 1e-12)
    assert not ball.contains(refined.x_exit[mask]).any()
    assert ball.contains(refined.x_pre[mask]).all()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
