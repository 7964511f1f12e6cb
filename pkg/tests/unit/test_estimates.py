"""
Unit tests for the bound harness, gradient estimates and the counterexample
"""
import numpy as np
import pytest

from errors import PreconditionError, RegimeEmptyError, UnsupportedRouteError
from models import Ball, RadialProfile
from modules import estimates
from modules.estimates import BoundSpec, ClosedFormHarmonic, GradientProbe
from utils.grids import fit_log_slope

BOX = ((1.2,), (2.0,))


def test_product_grid_shape():
    grid = estimates.product_grid(t=[1.0, 2.0], r=[0.1, 0.2, 0.3])
    assert grid['t'].tolist() == [1.0, 1.0, 1.0, 2.0, 2.0, 2.0]
    assert grid['r'].tolist() == [0.1, 0.2, 0.3, 0.1, 0.2, 0.3]


def test_evaluate_bound_empty_regime():
    """A regime that keeps nothing is an error, not a pass"""
    bound = BoundSpec('empty', lambda g: g['x'], lambda g: np.ones_like(g['x']),
                      regime=lambda g: g['x'] > 10.0, regime_label='x > 10')
    with pytest.raises(RegimeEmptyError):
        estimates.evaluate_bound(bound, estimates.product_grid(x=np.linspace(0.0, 1.0, 5)))


def test_evaluate_bound_rejects_nonpositive_rhs():
    bound = BoundSpec('bad', lambda g: g['x'], lambda g: g['x'] - 0.5)
    with pytest.raises(PreconditionError):
        estimates.evaluate_bound(bound, estimates.product_grid(x=np.linspace(0.0, 1.0, 5)))


def test_evaluate_bound_counts_excluded():
    bound = BoundSpec('square', lambda g: g['x'] ** 2, lambda g: g['x'], regime=lambda g: g['x'] > 0)
    report = estimates.evaluate_bound(bound, estimates.product_grid(x=np.linspace(0.0, 1.0, 11)))
    assert report.excluded == 1
    assert report.constant == pytest.approx(1.0)
    assert report.passed


def test_density_gradient_cauchy(cauchy_spec):
    """|p'_t(r)| = 2rt / (π(t² + r²)²) in d = 1"""
    t, r = 0.7, np.array([0.1, 1.0, 5.0])
    expected = 2.0 * r * t / (np.pi * (t * t + r * r) ** 2)
    assert np.allclose(estimates.density_gradient(cauchy_spec, t, r), expected, rtol=1e-12)


def test_check_grad_pt_cauchy(cauchy_spec):
    """All three derivative bounds hold with finite constants"""
    grid = np.geomspace(1e-2, 1e2, 12)
    first, second, third = estimates.check_grad_pt(cauchy_spec, grid, grid)
    assert first.passed and second.passed
    assert third is not None and third.passed
    assert np.isfinite(third.constant)


def test_check_grad_pt_lower_needs_r0(cauchy_spec):
    grid = np.geomspace(1e-1, 1e1, 5)
    with pytest.raises(PreconditionError):
        estimates.check_grad_pt(cauchy_spec, grid, grid, theta0=1.0)


def test_gradient_probe_validation():
    harmonic = ClosedFormHarmonic(alpha=1.0, ball=Ball.centered(1, 1.0), box=BOX)
    probe = GradientProbe(f=harmonic, x=(0.5,), delta_D=0.5)
    assert probe.h == (0.5 / 8, 0.5 / 16, 0.5 / 32)
    with pytest.raises(PreconditionError):
        GradientProbe(f=harmonic, x=(1.0,), delta_D=0.0)
    with pytest.raises(PreconditionError):
        GradientProbe(f=harmonic, x=(0.5,), delta_D=0.5, h=(0.2, 0.1))
    with pytest.raises(PreconditionError):
        GradientProbe(f=harmonic, x=(0.5,), delta_D=0.5, h=(0.01, 0.02))


def test_richardson_order_of_central_difference():
    """Central differences of a smooth function converge at order 2"""
    order = estimates.richardson_order(np.sin, 0.5, (0.1, 0.05, 0.025, 0.0125))
    assert order == pytest.approx(2.0, abs=0.1)


def test_closed_form_harmonic_increases_toward_box():
    harmonic = ClosedFormHarmonic(alpha=1.0, ball=Ball.centered(1, 1.0), box=BOX)
    near, _ = harmonic.value((0.5,))
    far, _ = harmonic.value((-0.5,))
    assert 0.0 < far < near < 1.0
    result = estimates.probe_gradient(GradientProbe(f=harmonic, x=(0.5,), delta_D=0.5))
    assert result['gradient'][0] > 0
    assert not result['inconclusive']


def test_harmonic_gradient_closed_form(stable_spec):
    """Boundary Harnack gradient bound holds with no trend in δ"""
    report = estimates.check_harmonic_gradient(stable_spec, Ball.centered(1, 1.0), BOX)
    assert report.passed
    assert abs(report.details['trend_slope']) < 0.15


def test_green_gradient_closed_form(cauchy_spec):
    report = estimates.check_green_gradient(cauchy_spec)
    assert report.passed
    assert report.excluded > 0


def test_green_gradient_needs_interval(load_spec):
    with pytest.raises(UnsupportedRouteError):
        estimates.check_green_gradient(load_spec('stable_a1_d2'))


def test_lipschitz_reflection_preconditions(stable_spec):
    with pytest.raises(PreconditionError):
        estimates.check_lipschitz_reflection(stable_spec, r=0.3)
    with pytest.raises(PreconditionError):
        estimates.check_lipschitz_reflection(stable_spec, r=0.2, h_grid=[0.05])
    with pytest.raises(PreconditionError):
        estimates.check_lipschitz_reflection(stable_spec, r=0.2, boundary=((0.5,), (1.0,)))


def test_lipschitz_reflection_closed_form(stable_spec):
    report = estimates.check_lipschitz_reflection(stable_spec)
    assert report.passed
    assert len(report.points) == 8
    assert np.all(report.lhs > 0)


def test_counterexample_rejects_infeasible_triple():
    with pytest.raises(PreconditionError, match="alpha - beta \\+ gamma < 0"):
        estimates.run_counterexample(alpha=0.3, gamma=0.6, beta=0.5)


def test_g_difference_exponent():
    """g(y) - g(-y) behaves like y^{1-β+γ} near 0"""
    spec = estimates.counterexample_spec(0.3, 0.6, 0.95)
    y = np.geomspace(1e-7, 1e-5, 5)
    values = np.array([estimates.g_difference(spec, 0.95, float(v)) for v in y])
    assert np.all(values > 0)
    slope, _ = fit_log_slope(y, values)
    assert slope == pytest.approx(0.65, abs=0.05)


@pytest.mark.slow
def test_counterexample_run():
    """The compactly supported example has no derivative at 0"""
    report = estimates.run_counterexample()
    assert report.g_passed
    assert report.f_exponent < 0.98
    assert np.all(report.f_difference > 0)
    assert np.all(report.f_difference < report.f_leading)
    assert np.all(report.killed_bound > 0)
    assert report.passed


def test_killed_bound_is_linear_in_x():
    """The sup over exit points sits at z = 1/2 for a decreasing potential"""
    grid = np.geomspace(1e-6, 10.0, 200)
    potential = RadialProfile(grid=grid, values=grid ** -0.7, d=1, kind='potential')
    bound = estimates.killed_bound(potential, 1e-4)
    assert bound == pytest.approx(2e-4 * 0.7 * 0.5 ** -1.7, rel=1e-3)
    assert estimates.killed_bound(potential, 2e-4) / bound == pytest.approx(2.0, rel=1e-3)


def test_g_mass_clips_negative_part():
    grid = np.geomspace(1e-10, 0.5, 400)
    profile = RadialProfile(grid=grid, values=grid ** 0.65, d=1)
    assert estimates.g_mass(profile) == pytest.approx(0.5 ** 1.65 / 1.65, rel=1e-3)
    signed = RadialProfile(grid=grid, values=np.where(grid < 0.25, -1.0, 1.0), d=1)
    assert 0.24 < estimates.g_mass(signed) < 0.26


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
