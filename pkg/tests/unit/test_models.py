"""
Unit tests for the data models
"""
import numpy as np
import pytest

from models import (Ball, BoundReport, CounterexampleReport, PathConfig, ProcessSpec, RadialProfile,
                    ReflectedPoint, RunManifest, reflect)


def test_process_spec_round_trip():
    """from_dict(to_dict(spec)) gives back an equal spec"""
    spec = ProcessSpec(kind='stable', dimension=2, parameters=(('alpha', 1.5),), spec_id='s')
    assert ProcessSpec.from_dict(spec.to_dict()) == spec


def test_process_spec_derived_flags():
    """Subordinate, transient and stability flags follow the kind and dimension"""
    spec = ProcessSpec(kind='stable', dimension=1, parameters=(('alpha', 1.0),))
    assert spec.is_subordinate
    assert spec.is_cauchy
    assert spec.stability_index == 1.0
    assert not spec.is_transient
    assert spec.with_dimension(3).is_transient
    truncated = ProcessSpec(kind='truncated_stable', dimension=1, parameters=(('alpha', 1.0),))
    assert not truncated.is_subordinate
    assert truncated.stability_index is None


def test_process_spec_missing_parameter():
    """param raises KeyError without a default"""
    spec = ProcessSpec(kind='relativistic', dimension=3, parameters=(('m', 1.0),))
    assert spec.param('m') == 1.0
    assert spec.param('alpha', 0.5) == 0.5
    with pytest.raises(KeyError):
        spec.param('alpha')


def test_ball_contains_is_open():
    """Boundary points are not inside the ball"""
    ball = Ball.centered(2, 1.0)
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [2.0, 0.0]])
    assert ball.contains(points).tolist() == [True, False, True, False]
    assert ball.distance_to_boundary((0.25, 0.0)) == pytest.approx(0.75)


def test_annulus_distance():
    """Annulus distance is to the nearer sphere"""
    ring = Ball.centered(1, 1.0, inner_radius=0.5)
    assert ring.is_annulus
    assert ring.distance_to_boundary((0.6,)) == pytest.approx(0.1)
    assert not ring.contains(np.array([[0.2]]))[0]


def test_radial_profile_rejects_bad_grid():
    """Grids must be positive and increasing"""
    with pytest.raises(ValueError):
        RadialProfile(grid=np.array([1.0, 0.5]), values=np.array([1.0, 2.0]), d=1)
    with pytest.raises(ValueError):
        RadialProfile(grid=np.array([1.0, 2.0]), values=np.array([1.0, np.nan]), d=1)


def test_radial_profile_power_law_interpolation():
    """Log-log interpolation reproduces a power law on and off the grid"""
    grid = np.geomspace(1e-2, 1e2, 41)
    profile = RadialProfile(grid=grid, values=grid ** -1.5, d=1)
    for r in (0.37, 5.0, 1e-3, 1e3):
        assert profile(r) == pytest.approx(r ** -1.5, rel=1e-6)


def test_bound_report_fixed_and_fit():
    """fixed_constant passes under 1 + tol; fit_constant passes when finite"""
    fixed = BoundReport(name='f', points=[{}, {}], lhs=[1.0, 0.5], rhs=[1.0, 1.0],
                        fit_mode='fixed_constant', tolerance=0.0)
    assert fixed.passed and fixed.max_ratio == 1.0
    failing = BoundReport(name='f', points=[{}], lhs=[2.0], rhs=[1.0], fit_mode='fixed_constant',
                          tolerance=0.5)
    assert not failing.passed
    fitted = BoundReport(name='c', points=[{'x': 1.0}, {'x': 2.0}], lhs=[3.0, 1.0], rhs=[1.0, 1.0])
    assert fitted.passed
    assert fitted.constant == 3.0
    assert fitted.witness == {'x': 1.0}


def test_bound_report_refinement_drift_fails():
    """A constant that moves more than the tolerance under refinement fails the report"""
    base = BoundReport(name='c', points=[{}], lhs=[1.0], rhs=[1.0], tolerance=0.1)
    close = BoundReport(name='c', points=[{}], lhs=[1.05], rhs=[1.0])
    assert base.require_stable(close)
    assert base.passed
    far = BoundReport(name='c', points=[{}], lhs=[2.0], rhs=[1.0])
    assert not base.require_stable(far)
    assert not base.passed


def test_empty_bound_report_fails():
    """No points, no pass"""
    report = BoundReport(name='empty', points=[], lhs=[], rhs=[])
    assert not report.passed


def test_bound_report_json_round_trip():
    """to_dict / from_dict keep the ratios"""
    report = BoundReport(name='c', points=[{'t': 1.0}], lhs=[2.0], rhs=[4.0], spec_id='cauchy')
    again = BoundReport.from_dict(report.to_dict())
    assert again.max_ratio == pytest.approx(0.5)
    assert again.spec_id == 'cauchy'


def test_path_config_validation():
    """Nonsense Monte Carlo settings are rejected"""
    with pytest.raises(ValueError):
        PathConfig(n_paths=0)
    with pytest.raises(ValueError):
        PathConfig(dt=1.0, max_time=0.5)
    cfg = PathConfig(dt=1e-3, seed=3)
    assert cfg.halved().dt == pytest.approx(5e-4)
    assert cfg.halved().seed == 3
    assert isinstance(PathConfig(max_time=20, dt=1).max_time, float)
    assert PathConfig.from_dict({'dt': 1, 'max_time': 20}).dt == 1.0


def test_reflect_is_involution():
    """Reflecting twice gives the point back"""
    x = (0.3, -1.0, 2.0)
    assert reflect(x) == (-0.3, -1.0, 2.0)
    assert reflect(reflect(x)) == x
    assert ReflectedPoint(x).hat == (-0.3, -1.0, 2.0)
    with pytest.raises(ValueError):
        ReflectedPoint((-0.1, 0.0))


def test_counterexample_report_verdicts():
    """Both exponent gates must hold"""
    report = CounterexampleReport(alpha=0.3, gamma=0.6, beta=0.95, g_exponent=0.66, g_expected=0.65,
                                  g_tolerance=0.05, f_exponent=0.93, f_threshold=0.98,
                                  quotient_growing=True)
    assert report.passed
    assert report.predicted_exponent == pytest.approx(0.95)
    report.f_exponent = 1.0
    assert not report.passed


def test_manifest_hash_covers_inputs():
    """Changing any input changes the hash; timestamps do not"""
    first = RunManifest(command='density', spec_id='cauchy', parameters={'t': 1.0}, seed=None)
    second = RunManifest(command='density', spec_id='cauchy', parameters={'t': 1.0}, seed=None)
    third = RunManifest(command='density', spec_id='cauchy', parameters={'t': 2.0}, seed=None)
    assert first.input_hash == second.input_hash
    assert first.input_hash != third.input_hash
    first.add_output('a.csv')
    first.add_output('a.csv')
    assert first.outputs == ['a.csv']


def test_radial_profile_mass_check():
    """A stored mass that disagrees with the values is detected"""
    grid = np.geomspace(1e-3, 1e3, 301)
    values = 1.0 / (np.pi * (1.0 + grid ** 2))
    profile = RadialProfile.tabulate(grid, values, d=1)
    assert profile.check_mass()
    wrong = RadialProfile(grid=grid, values=values, d=1, mass=2.0 * profile.mass)
    assert not wrong.check_mass()
    assert RadialProfile(grid=grid, values=values, d=1).check_mass()


def test_counterexample_report_rows_carry_both_f_series():
    report = CounterexampleReport(alpha=0.3, gamma=0.6, beta=0.95, g_exponent=0.66, g_expected=0.65,
                                  g_tolerance=0.05, f_exponent=0.9, f_threshold=0.98, quotient_growing=True,
                                  y=np.array([1e-6]), g_difference=np.array([2e-4]),
                                  x=np.array([1e-6, 1e-5]), f_difference=np.array([1e-5, 8e-5]),
                                  f_leading=np.array([1.1e-5, 8.5e-5]), killed_bound=np.array([1e-6, 1e-5]))
    series = [row[0] for row in report.rows()]
    assert series == ['g', 'f', 'f', 'f_leading', 'f_leading']


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
