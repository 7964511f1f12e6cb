"""
Unit tests for the exception hierarchy and exit codes
"""
import pytest

from errors import (DomainError, ExtrapolationError, InsufficientSamplesError, NumericBudgetError,
                    PreconditionError, QuadratureError, RangeError, RegimeEmptyError, SpecParseError,
                    ToolkitError, UnimodalityError, UnsupportedRouteError, UsageError)


@pytest.mark.parametrize('error_class, code', [
    (UsageError, 2),
    (PreconditionError, 3),
    (DomainError, 3),
    (RangeError, 3),
    (RegimeEmptyError, 3),
    (UnsupportedRouteError, 3),
    (NumericBudgetError, 4),
    (ExtrapolationError, 4),
    (InsufficientSamplesError, 4),
    (UnimodalityError, 1),
])
def test_exit_codes(error_class, code):
    """Each error class maps to its CLI exit code"""
    assert error_class("boom").exit_code == code


def test_spec_parse_error_carries_location():
    """Line and column appear in the message and details"""
    error = SpecParseError("bad value", line=4, column=9, path="specs/x.toml")
    assert str(error).startswith("specs/x.toml:4:9")
    assert error.exit_code == 2
    assert error.details['line'] == 4


def test_quadrature_error_keeps_partial_sums():
    """Diagnostics survive to the JSON form"""
    error = QuadratureError("no convergence", partial_sums=[1.0, 0.5, 0.75])
    payload = error.to_dict()
    assert payload['error'] == 'QuadratureError'
    assert payload['exit_code'] == 4
    assert list(error.partial_sums) == [1.0, 0.5, 0.75]


def test_stdlib_bases():
    """Errors stay catchable by their stdlib bases"""
    assert isinstance(PreconditionError("x"), ValueError)
    assert isinstance(NumericBudgetError("x"), RuntimeError)
    assert isinstance(UnimodalityError("x"), ArithmeticError)
    assert isinstance(UsageError("x"), ToolkitError)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
