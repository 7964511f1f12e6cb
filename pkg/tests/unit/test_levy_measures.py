"""
Unit tests for Lévy densities and hypothesis checkers
"""
import numpy as np
import pytest

from modules import levy_measures
from modules.levy_measures import levy_density
from services import stable_ball


def test_stable_density_value(stable_spec):
    """ν(r) = A_{1,1} r^{-2}"""
    nu = levy_density(stable_spec)
    assert nu(0.5) == pytest.approx(stable_ball.stable_constant(1, 1.0) * 4.0)
    assert stable_ball.stable_constant(1, 1.0) == pytest.approx(1.0 / np.pi)


def test_truncated_stable_is_continuous_at_one(load_spec):
    """Both branches agree at r = 1 with matching slopes"""
    nu = levy_density(load_spec('truncated_stable_a1_d1'))
    assert nu(1.0 - 1e-9) == pytest.approx(nu(1.0 + 1e-9), rel=1e-6)
    assert nu.derivative(1.0 - 1e-9) == pytest.approx(nu.derivative(1.0 + 1e-9), rel=1e-6)


def test_counterexample_density_shape(load_spec):
    """Stable on (0, 1], 1 - (r-1)^γ on (1, 2], zero beyond"""
    spec = load_spec('counterexample')
    nu = levy_density(spec)
    A = stable_ball.stable_constant(1, 0.3)
    assert nu(0.5) == pytest.approx(A * 0.5 ** -1.3)
    assert nu(1.5) == pytest.approx(A * (1.0 - 0.5 ** 0.6))
    assert nu(2.5) == 0.0
    assert nu.support == 2.0


def test_h1_passes_for_truncated_stable(load_spec):
    """The tempered example satisfies every part of (H1)"""
    assert all(report.passed for report in levy_measures.check_H1(load_spec('truncated_stable_a1_d1')))


def test_h1_monotone_fails_for_counterexample(load_spec):
    """-ν'(r)/r jumps up just after r = 1"""
    monotone, _, _ = levy_measures.check_H1(load_spec('counterexample'))
    assert not monotone.passed
    assert monotone.witness['r'] == pytest.approx(1.0, abs=0.05)


def test_levy_limits_for_stable(stable_spec):
    """r³ν(r) → 0 at 0 and rν(r) → 0 at ∞"""
    assert levy_measures.levy_limit_report(stable_spec).passed


def test_levy_upper_bound_stable(stable_spec):
    """ν(r) L²(r) r^d is constant for stable specs"""
    report = levy_measures.levy_upper_bound_report(stable_spec)
    assert report.passed
    ratios = report.ratios
    assert np.allclose(ratios, ratios[0], rtol=1e-3)


def test_nu_from_subordinator_stable(stable_spec):
    """Subordinating the 1/2-stable subordinator gives A r^{-1-α}"""
    expected = stable_ball.stable_constant(1, 1.0) * 0.5 ** -2
    assert levy_measures.nu_from_subordinator(stable_spec, r=0.5) == pytest.approx(expected, rel=1e-5)


def test_quotient_bounds_hold_with_h1_constant(stable_spec):
    """a₁ from the (H1) ratios is enough for the log-derivative, ratio and difference bounds"""
    _, shift, doubling = levy_measures.check_H1(stable_spec)
    a1 = levy_measures.h1_constant([shift, doubling])
    assert a1 >= 4.0
    report = levy_measures.levy_quotient_bounds(stable_spec, a1)
    assert report.passed
    assert report.details['a1'] == a1


def test_tilde_nu_bound_on_pairs(stable_spec):
    _, shift, doubling = levy_measures.check_H1(stable_spec)
    a1 = levy_measures.h1_constant([shift, doubling])
    pairs = [((v,), (z,)) for v in (0.2, 1.0, 3.0) for z in (0.1, 0.5, 2.0)]
    report = levy_measures.check_tilde_nu_bound(stable_spec, a1, pairs)
    assert len(report.points) == 9
    assert report.passed


def test_small_time_limit_recovers_nu(cauchy_spec):
    """p_t(r)/t → ν(r) = 1/(π r²) as t → 0"""
    value, error = levy_measures.nu_small_time_limit(cauchy_spec, 1.0)
    assert value == pytest.approx(1.0 / np.pi, rel=1e-5)
    assert error <= 1e-3 * value


def test_h7_exact_exponent_for_stable(stable_spec):
    """φ(λ) = λ^{1/2} has φ'(λθ)/φ'(θ) = λ^{-1/2} exactly"""
    report = levy_measures.check_H7_phi_prime(stable_spec, delta=0.5)
    assert report.passed
    assert report.constant == pytest.approx(1.0, rel=1e-6)
    assert not levy_measures.check_H7_phi_prime(stable_spec, delta=1.0).passed


def test_h7_fitted_delta_and_range(stable_spec):
    report = levy_measures.check_H7_phi_prime(stable_spec)
    assert report.passed
    assert report.notes.startswith('fitted delta=')
    assert report.witness['delta'] >= 0.5
    with pytest.raises(ValueError):
        levy_measures.check_H7_phi_prime(stable_spec, delta=1.5)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
