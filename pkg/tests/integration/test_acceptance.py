"""
End-to-end numerical acceptance: closed-form oracles and property checks
"""
import numpy as np
import pytest

from models import Ball
from models.samples import PathConfig
from modules import difference, estimates, levy_measures, sampling, transforms
from modules.levy_measures import levy_density
from services import stable_ball

pytestmark = [pytest.mark.integration, pytest.mark.slow]


def test_dimension_walk_cauchy(cauchy_spec):
    """Walked p_1 equals t/(π²(t²+r²)²) on [1e-2, 1e2]"""
    walked = transforms.dimension_walk(transforms.cached_transition_density(cauchy_spec, 1.0))
    r = np.geomspace(1e-2, 1e2, 101)
    expected = 1.0 / (np.pi ** 2 * (1.0 + r * r) ** 2)
    assert np.allclose(walked(r), expected, rtol=1e-5)


def test_levy_lift_preserves_exponent(stable_spec):
    """The lifted stable density has exponent |ξ| in d = 3"""
    nu = levy_density(stable_spec).profile(np.geomspace(1e-6, 1e6, 481))
    lifted = transforms.levy_lift(nu)
    for xi in (0.1, 1.0, 10.0, 100.0):
        assert transforms.lifted_exponent(lifted, xi) == pytest.approx(xi, rel=1e-3)


def test_chapman_kolmogorov_cauchy(cauchy_spec):
    pairs = [(x, z) for x in (0.1, 1.0, 3.0) for z in (0.2, 0.8, 2.5)]
    report = difference.chapman_report(cauchy_spec, 0.5, 0.5, pairs)
    assert len(report.points) == 9
    assert report.passed


@pytest.mark.parametrize("spec_id,alpha", [('stable_a05_d1', 0.5), ('stable_a1_d1', 1.0),
                                           ('stable_a15_d1', 1.5)])
def test_exit_time_sandwich(load_spec, spec_id, alpha):
    """MC mean exit time matches the closed form; sandwich constants survive n -> 2n"""
    spec = load_spec(spec_id)
    cfg = PathConfig(n_paths=100000, seed=20140101, refinement=0)
    estimate = sampling.exit_time_mean(spec, Ball.centered(1, 1.0), (0.0,), cfg)
    expected = float(stable_ball.exit_time_mean(alpha, 1, 1.0, (0.0,)))
    assert abs(estimate.value - expected) <= 3.0 * estimate.stderr

    small = PathConfig(n_paths=20000, seed=20140101, refinement=0)
    upper, lower = sampling.check_exit_sandwich(spec, radii=(1.0,), fractions=(0.0, 0.5), cfg=small)
    upper_2n, lower_2n = sampling.check_exit_sandwich(spec, radii=(1.0,), fractions=(0.0, 0.5),
                                                      cfg=small.with_paths(40000))
    assert upper.require_stable(upper_2n)
    assert lower.require_stable(lower_2n)


@pytest.mark.parametrize("spec_id", ['stable_a1_d1', 'stable_a15_d1'])
def test_derivative_bounds_stable(load_spec, spec_id):
    """All three ratio suites bounded on a 100×100 log-grid, stable under refinement"""
    spec = load_spec(spec_id)

    def build(points):
        grid = np.geomspace(1e-2, 1e2, points)
        return estimates.check_grad_pt(spec, grid, grid)

    reports = estimates.refinement_stability(build, 100)
    assert all(report.passed for report in reports)


def test_harmonic_gradient_plane(load_spec):
    """|∇f|(δ∧1)/f stays bounded without trend for δ from 0.4 to 0.02"""
    spec = load_spec('stable_a1_d2')
    report = estimates.check_harmonic_gradient(spec, Ball.centered(2, 1.0), ((1.2, -0.4), (2.0, 0.4)))
    assert report.passed
    assert abs(report.details['trend_slope']) <= 0.15


def test_green_gradient_interval(stable_spec):
    report = estimates.check_green_gradient(stable_spec)
    assert report.passed
    assert report.excluded > 0


def test_counterexample_exponents():
    report = estimates.run_counterexample(0.3, 0.6, 0.95)
    assert report.g_exponent == pytest.approx(0.65, abs=0.05)
    assert report.f_exponent < 0.98
    assert report.passed


@pytest.mark.parametrize("spec_id", ['relativistic_m1_d3', 'truncated_stable_a1_d1'])
def test_h1_holds_for_examples(load_spec, spec_id):
    assert all(report.passed for report in levy_measures.check_H1(load_spec(spec_id)))


def test_h1_monotonicity_fails_for_counterexample(load_spec):
    monotone, _, _ = levy_measures.check_H1(load_spec('counterexample'))
    assert not monotone.passed
    assert monotone.witness['r'] > 1.0


def test_ikeda_watanabe_consistency(stable_spec):
    cfg = PathConfig(n_paths=100000, seed=20140101)
    report = sampling.ikeda_watanabe_check(stable_spec, Ball.centered(1, 1.0), (2.0,), (3.0,), (0.0,), cfg)
    assert report.passed
    assert report.details['quadrature'] > 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
