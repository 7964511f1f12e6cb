"""
Unit tests for the half-space difference kernel and Green functions
"""
import numpy as np
import pytest

from errors import PreconditionError, UnsupportedRouteError
from modules import difference
from services import stable_ball


def test_diff_kernel_cauchy_closed_form(cauchy_spec):
    """p̃_t(x, y) = p_t(x - y) - p_t(x + y) on the half-line"""
    x, y = 0.4, 1.3
    expected = (stable_ball.cauchy_density(1, 1.0, x - y) - stable_ball.cauchy_density(1, 1.0, x + y))
    assert difference.diff_kernel(cauchy_spec, 1.0, x, y) == pytest.approx(float(expected), rel=1e-5)


def test_diff_kernel_bounds(cauchy_spec):
    """0 ≤ p̃_t ≤ p_t, with zero on the hyperplane"""
    kernel = difference.DifferenceKernel.for_spec(cauchy_spec, 0.5)
    for x, y in [(0.1, 0.2), (1.0, 3.0), (2.0, 0.5)]:
        value = kernel(x, y)
        assert 0.0 <= value <= float(stable_ball.cauchy_density(1, 0.5, x - y)) + 1e-12
    assert kernel(0.0, 0.7) == pytest.approx(0.0, abs=1e-14)


def test_diff_kernel_is_symmetric(stable_spec):
    kernel = difference.DifferenceKernel.for_spec(stable_spec, 1.0)
    assert kernel(0.3, 1.1) == pytest.approx(kernel(1.1, 0.3), rel=1e-12)


def test_diff_kernel_rejects_lower_half(cauchy_spec):
    with pytest.raises(PreconditionError):
        difference.diff_kernel(cauchy_spec, 1.0, -0.1, 0.5)
    with pytest.raises(PreconditionError):
        difference.DifferenceKernel.for_spec(cauchy_spec, 0.0)


def test_halfspace_mass_cauchy(cauchy_spec):
    """P(|X_t| < x) = (2/π) arctan(x/t)"""
    result = difference.halfspace_mass(cauchy_spec, 1.0, (0.5,))
    assert result['mass'] == pytest.approx(2.0 / np.pi * np.arctan(0.5), rel=1e-6)
    assert result['cemetery'] == pytest.approx(1.0 - result['mass'])


def test_chapman_residual_small(cauchy_spec):
    """Killed kernels satisfy Chapman-Kolmogorov on the half-line"""
    residual = difference.chapman_check(cauchy_spec, 0.5, 0.5, 0.3, 1.2)
    scale = difference.diff_kernel(cauchy_spec, 1.0, 0.3, 1.2)
    assert residual < 1e-4 * scale + 1e-8


def test_chapman_needs_line(load_spec):
    with pytest.raises(UnsupportedRouteError):
        difference.chapman_check(load_spec('stable_a1_d2'), 0.5, 0.5, 0.3, 1.2)


def test_tilde_nu_nonnegative(stable_spec):
    """ν̃ ≥ 0 on the half-line and vanishes on the boundary"""
    values = [difference.tilde_nu(stable_spec, v, z) for v, z in [(0.2, 0.5), (1.0, 3.0), (4.0, 0.1)]]
    assert all(value > 0 for value in values)
    assert difference.tilde_nu(stable_spec, 0.0, 0.5) == 0.0


def test_green_closed_form_symmetric(stable_spec):
    """G_B(x, y) = G_B(y, x)"""
    forward, _ = difference.green_ball(stable_spec, 1.0, 0.2, [[-0.5]], method='closed_form')
    backward, _ = difference.green_ball(stable_spec, 1.0, -0.5, [[0.2]], method='closed_form')
    assert forward[0] == pytest.approx(backward[0], rel=1e-10)
    assert forward[0] > 0


def test_diff_green_halfball_positive(stable_spec):
    """G̃ is positive in the open half-ball"""
    value, error = difference.diff_green_halfball(stable_spec, 1.0, 0.3, 0.6, method='closed_form')
    assert value > 0
    assert error == 0.0


def test_diff_green_halfball_needs_half_ball(stable_spec):
    with pytest.raises(PreconditionError):
        difference.diff_green_halfball(stable_spec, 1.0, -0.3, 0.6, method='closed_form')


def test_green_hat_bounds_closed_form(stable_spec):
    """Both forms of the G̃ upper bound fit a finite constant; y < 4x pairs are skipped"""
    potential_form, scale_form = difference.check_green_hat_bound(stable_spec, method='closed_form')
    assert potential_form.passed and scale_form.passed
    assert len(potential_form.points) == len(scale_form.points)
    assert all(point['y1'] >= 4.0 * point['x1'] for point in potential_form.points)


def test_green_hat_bound_needs_far_pairs(stable_spec):
    with pytest.raises(PreconditionError):
        difference.check_green_hat_bound(stable_spec, x_values=(0.3,), y_fractions=(0.5,), method='closed_form')


def test_tilde_green_bound_closed_form(stable_spec):
    report = difference.check_tilde_green_bound(stable_spec, method='closed_form')
    assert len(report.points) == 3 * 3 * 5
    assert report.passed


def test_tilde_green_bound_rejects_large_radius(stable_spec):
    with pytest.raises(PreconditionError):
        difference.check_tilde_green_bound(stable_spec, radii=(2.0,), method='closed_form')


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
