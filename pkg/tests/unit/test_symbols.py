"""
Unit tests for Laplace and characteristic exponents and scale functions
"""
import numpy as np
import pytest

from errors import UnsupportedRouteError
from models import ProcessSpec
from modules import symbols
from modules.symbols import LaplaceExponent


def test_stable_exponent_closed_form(stable_spec):
    """ψ(ξ) = |ξ|^α for the stable spec"""
    R = np.array([0.1, 1.0, 7.0])
    assert np.allclose(symbols.eval_psi(stable_spec, R), R)


def test_relativistic_laplace_exponent():
    """φ(λ) = √(λ+m²) - m, and φ(0) = 0"""
    phi = LaplaceExponent('relativistic', (('m', 1.0),))
    assert phi(3.0) == pytest.approx(1.0)
    assert phi(0.0) == 0.0


def test_conjugate_vg_small_lambda_is_smooth():
    """The series branch joins the direct formula"""
    phi = LaplaceExponent('conjugate_vg')
    assert phi(1e-5) == pytest.approx(1e-5 / 2.0, rel=1e-4)
    assert phi(2e-4) == pytest.approx(2e-4 / np.log1p(2e-4) - 1.0, rel=1e-6)


def test_geometric_stable_beta_two_is_gamma():
    """β = 2 gives the gamma subordinator"""
    spec = ProcessSpec(kind='geometric_stable', dimension=1, parameters=(('beta', 2.0),))
    assert LaplaceExponent.for_spec(spec).kind == 'gamma'


def test_laplace_exponent_needs_subordinate_spec():
    """Lévy-measure kinds have no Laplace exponent"""
    spec = ProcessSpec(kind='truncated_stable', dimension=1, parameters=(('alpha', 1.0),))
    with pytest.raises(UnsupportedRouteError):
        symbols.laplace_exponent(spec)


@pytest.mark.parametrize('kind, params', [
    ('relativistic', (('m', 1.0),)),
    ('geometric_stable', (('beta', 1.0),)),
    ('conjugate_vg', ()),
])
def test_first_derivative_matches_difference_quotient(kind, params):
    """φ' agrees with a central difference of φ"""
    phi = LaplaceExponent(kind, params)
    lam = np.array([0.3, 2.0, 50.0])
    h = 1e-5 * lam
    numeric = (phi(lam + h) - phi(lam - h)) / (2 * h)
    assert np.allclose(phi.derivative(lam), numeric, rtol=1e-6)


def test_bernstein_spot_check_passes_for_examples(load_spec):
    """Sign pattern of φ derivatives holds for the shipped subordinators"""
    for name in ('relativistic_m1_d3', 'geometric_stable_b1_d1', 'conjugate_vg_d3'):
        assert symbols.check_H10_bernstein(load_spec(name)).passed


def test_psi_star_and_inverse(stable_spec):
    """ψ⁻ inverts ψ* and L(r) = r^{α/2} for stable specs"""
    u = np.array([0.5, 2.0, 10.0])
    assert np.allclose(symbols.psi_star(stable_spec, symbols.psi_inverse(stable_spec, u)), u, rtol=1e-6)
    assert symbols.scale_L(stable_spec, 4.0) == pytest.approx(2.0)


def test_scale_l_needs_positive_radius(stable_spec):
    """L(0) is undefined"""
    with pytest.raises(ValueError):
        symbols.scale_L(stable_spec, 0.0)


def test_stable_scaling_conditions(load_spec):
    """Stable α = 1/2 satisfies WLSC and WUSC with index α"""
    spec = load_spec('stable_a05_d1')
    assert symbols.check_wlsc(spec, 0.5).passed
    assert symbols.check_wusc(spec, 0.5).passed


def test_wlsc_fails_above_index(load_spec):
    """A lower index above α cannot hold globally"""
    spec = load_spec('stable_a05_d1')
    assert not symbols.check_wlsc(spec, 1.0).passed


def test_scale_function_invariants(stable_spec):
    """ψ ≤ ψ* ≤ π²ψ; L is nondecreasing and doubles by at most √10"""
    invariants = symbols.ScaleFunctions.for_spec(stable_spec).invariants()
    assert invariants == {'psi_le_star': True, 'star_le_pi2_psi': True,
                          'L_nondecreasing': True, 'L_doubling': True}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
