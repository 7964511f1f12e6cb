"""
Unit tests for spec validation and spec-file loading
"""
import pytest

from errors import SpecParseError
from models import Ball
from utils.validators import (list_spec_files, load_spec_file, parse_spec_text, resolve_spec,
                              validate_counterexample_triple, validate_parameters, validate_point_in_ball)


def test_counterexample_triple_feasible():
    """The default triple satisfies every inequality"""
    is_valid, error = validate_counterexample_triple(0.3, 0.6, 0.95)
    assert is_valid
    assert error == ""


def test_counterexample_triple_lists_violations():
    """Lowering β so that α - β + γ > 0 is reported"""
    is_valid, error = validate_counterexample_triple(0.3, 0.6, 0.5)
    assert not is_valid
    assert "alpha - beta + gamma < 0" in error


def test_counterexample_triple_multiple_violations():
    """All violated inequalities are listed, not just the first"""
    is_valid, error = validate_counterexample_triple(0.6, 0.45, None)
    assert not is_valid
    assert "alpha < 1/2" in error
    assert "1/2 < gamma" in error
    assert "alpha + gamma < 1" in error


@pytest.mark.parametrize('kind, params', [
    ('stable', {'alpha': 2.5}),
    ('stable', {'alpha': 0.0}),
    ('relativistic', {'m': -1.0}),
    ('geometric_stable', {'beta': 2.5}),
    ('stable', {}),
    ('stable', {'alpha': 1.0, 'm': 1.0}),
    ('brownian', {}),
])
def test_invalid_parameters(kind, params):
    """Out-of-domain, missing or unknown parameters are rejected"""
    is_valid, error = validate_parameters(kind, 1, params)
    assert not is_valid
    assert error


def test_counterexample_needs_dimension_one():
    """The counterexample only lives on the line"""
    is_valid, error = validate_parameters('counterexample', 2, {'alpha': 0.3, 'gamma': 0.6})
    assert not is_valid
    assert error.startswith("dimension")


def test_parse_valid_text(spec_text):
    """A valid spec parses with its declared id"""
    spec = parse_spec_text(spec_text)
    assert spec.spec_id == 'parsed'
    assert spec.dimension == 2
    assert spec.param('alpha') == 1.5


def test_parse_rejects_alpha_out_of_range(spec_text):
    """α = 2.5 fails at parse time with the line of the offending key"""
    with pytest.raises(SpecParseError) as info:
        parse_spec_text(spec_text.replace('alpha = 1.5', 'alpha = 2.5'))
    assert info.value.line == 6
    assert info.value.exit_code == 2


def test_parse_reports_syntax_location():
    """TOML syntax errors carry line and column"""
    with pytest.raises(SpecParseError) as info:
        parse_spec_text('kind = "stable"\ndimension = = 1\n')
    assert info.value.line == 2


def test_shipped_specs_all_load():
    """Every shipped spec file validates"""
    paths = list_spec_files()
    assert len(paths) >= 10
    for path in paths:
        spec = load_spec_file(path)
        assert spec.label


def test_resolve_unknown_spec():
    """Unknown ids are a parse error"""
    with pytest.raises(SpecParseError):
        resolve_spec('no_such_spec')


def test_point_in_ball():
    """Closure of the ball is accepted, the outside is not"""
    ball = Ball.centered(1, 1.0)
    assert validate_point_in_ball(ball, (1.0,))[0]
    assert not validate_point_in_ball(ball, (1.5,))[0]
    assert not validate_point_in_ball(ball, (0.0, 0.0))[0]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
