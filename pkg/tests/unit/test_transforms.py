"""
Unit tests for transition densities, the dimension walk and potentials
"""
import numpy as np
import pytest

from errors import PreconditionError
from models import ProcessSpec, RadialProfile
from modules import transforms
from services import stable_ball


def test_cauchy_density_matches_closed_form(cauchy_spec):
    """p_1(r) = 1/(π(1+r²)) in d = 1"""
    grid = np.geomspace(1e-2, 1e2, 65)
    profile = transforms.transition_density(cauchy_spec, 1.0, grid=grid)
    assert np.allclose(profile.values, 1.0 / (np.pi * (1.0 + grid ** 2)), rtol=1e-6)
    assert profile.meta['origin_value'] == pytest.approx(1.0 / np.pi, abs=1e-6)
    assert profile.monotone


def test_density_at_scales_for_stable(load_spec):
    """p_t(r) = t^{-1/α} p_1(t^{-1/α} r) for stable α = 3/2"""
    spec = load_spec('stable_a15_d1')
    t = 0.3
    scale = t ** (-1.0 / 1.5)
    assert transforms.density_at(spec, t, 0.7) == pytest.approx(
        scale * transforms.density_at(spec, 1.0, 0.7 * scale), rel=1e-6)


def test_dimension_walk_cauchy_oracle(cauchy_spec):
    """Walking p_1 from d = 1 gives the d = 3 Cauchy density"""
    walked = transforms.dimension_walk(transforms.cached_transition_density(cauchy_spec, 1.0))
    r = np.geomspace(1e-2, 1e2, 21)
    assert np.allclose(walked(r), stable_ball.cauchy_density(3, 1.0, r), rtol=1e-5)


def test_dimension_walk_report_passes(cauchy_spec):
    """The identity report passes at its default tolerance"""
    report = transforms.dimension_walk_report(cauchy_spec, 1.0)
    assert report.passed
    assert report.name == 'dimension_walk'


def test_dimension_walk_needs_log_grid():
    """Non-log-uniform grids are rejected"""
    grid = np.linspace(0.1, 10.0, 80)
    profile = RadialProfile(grid=grid, values=1.0 / (1.0 + grid ** 2), d=1, monotone=True)
    with pytest.raises(PreconditionError):
        transforms.dimension_walk(profile)


def test_truncated_potential_cauchy(cauchy_spec):
    """∫_0^1 p_t(r) dt = log(1 + 1/r²)/(2π) for the Cauchy process"""
    grid = np.geomspace(1e-3, 1.0, 13)
    profile = transforms.truncated_potential(cauchy_spec, 1.0, d=1, grid=grid)
    assert np.allclose(profile.values, np.log1p(1.0 / grid ** 2) / (2.0 * np.pi), rtol=1e-5)


def test_compensated_potential_cauchy(cauchy_spec):
    """W(r) = -log(r)/π for ψ(ξ) = |ξ| in d = 1"""
    r = np.array([0.1, 0.5, 2.0, 10.0])
    assert np.allclose(transforms.compensated_potential_at(cauchy_spec, r), -np.log(r) / np.pi,
                       rtol=1e-5, atol=1e-9)
    assert transforms.compensated_potential_at(cauchy_spec, 1.0) == pytest.approx(0.0, abs=1e-9)


def test_potential_kernel_needs_transience(cauchy_spec):
    """The Cauchy process on the line is recurrent"""
    with pytest.raises(PreconditionError):
        transforms.potential_kernel(cauchy_spec)


def test_potential_kernel_riesz(load_spec):
    """U(r) = C r^{α-d} for stable α = 1 in d = 3"""
    spec = load_spec('stable_a1_d1').with_dimension(3)
    grid = np.array([0.1, 1.0, 10.0])
    profile = transforms.potential_kernel(spec, grid=grid, method='fourier')
    expected = stable_ball.riesz_constant(3, 1.0) * grid ** -2.0
    assert np.allclose(profile.values, expected, rtol=1e-3)


def test_levy_lift_of_stable_is_stable():
    """Lifting A_{1,α} r^{-1-α} gives A_{3,α} r^{-3-α}"""
    from modules.levy_measures import levy_density
    spec = ProcessSpec(kind='stable', dimension=1, parameters=(('alpha', 1.0),))
    grid = np.geomspace(1e-3, 1e3, 121)
    lifted = transforms.levy_lift(levy_density(spec).profile(grid))
    expected = stable_ball.stable_constant(3, 1.0) * grid ** -4.0
    assert np.allclose(lifted.values, expected, rtol=1e-10)


@pytest.mark.slow
def test_semigroup_property(cauchy_spec):
    """p_t * p_s = p_{t+s} for the Cauchy process"""
    assert transforms.semigroup_check(cauchy_spec).passed


def test_radial_inverse_fourier_exponential_line():
    """e^{-|ξ|} inverts to the Cauchy density on the line"""
    value = transforms.radial_inverse_fourier(lambda r: np.exp(-r), 1, 2.0)
    assert value == pytest.approx(1.0 / (5.0 * np.pi), rel=1e-6)


def test_radial_inverse_fourier_gaussian_space():
    """e^{-|ξ|²/2} inverts to (2π)^{-3/2} e^{-R²/2} in d = 3"""
    value = transforms.radial_inverse_fourier(lambda r: np.exp(-0.5 * r * r), 3, 1.0)
    assert value == pytest.approx((2.0 * np.pi) ** -1.5 * np.exp(-0.5), rel=1e-6)


def test_dimension_walk_report_stable_a15(load_spec):
    """Non-Cauchy specs are held to 1e-4 relative above the noise floor"""
    report = transforms.dimension_walk_report(load_spec('stable_a15_d1'), 1.0)
    assert report.details['relative_tolerance'] == 1e-4
    assert report.excluded == 0
    assert np.all(report.lhs <= report.rhs)
    assert report.passed


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
