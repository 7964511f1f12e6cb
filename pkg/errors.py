"""
Exception hierarchy
Every error carries the CLI exit code it maps to
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict:
        """Convert to dictionary (for JSON reports)"""
        return {
            'error': type(self).__name__,
            'message': self.message,
            'exit_code': self.exit_code,
            'details': self.details,
        }


# ================================================
# USAGE (exit 2)
# ================================================

class UsageError(ToolkitError, ValueError):
    """Bad command-line arguments"""

    exit_code = 2


class SpecParseError(ToolkitError, ValueError):
    """Spec file could not be parsed or failed validation"""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 path: Optional[str] = None):
        location = ""
        if path:
            location = f"{path}"
        if line is not None:
            location += f":{line}" + (f":{column}" if column is not None else "")
        super().__init__(f"{location}: {message}" if location else message,
                         {'line': line, 'column': column, 'path': path})
        self.line = line
        self.column = column


# ================================================
# PRECONDITIONS (exit 3)
# ================================================

class PreconditionError(ToolkitError, ValueError):
    """A documented precondition of an operation does not hold"""

    exit_code = 3


class DomainError(PreconditionError):
    """A Lévy density or integrand is not integrable where it must be"""


class RangeError(PreconditionError):
    """Requested value lies outside the tabulated range"""


class RegimeEmptyError(PreconditionError):
    """A bound regime predicate filtered out every grid point"""


class UnsupportedRouteError(PreconditionError):
    """No closed form, sampler or Green-function route exists for this spec"""


# ================================================
# NUMERIC BUDGETS (exit 4)
# ================================================

class NumericBudgetError(ToolkitError, RuntimeError):
    """A numerical budget was exhausted"""

    exit_code = 4


class QuadratureError(NumericBudgetError):
    """Quadrature failed to converge; partial sums are attached"""

    def __init__(self, message: str, partial_sums=None, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        if partial_sums is not None:
            details['partial_sums'] = [float(s) for s in list(partial_sums)[-12:]]
        super().__init__(message, details)
        self.partial_sums = partial_sums


class ExtrapolationError(NumericBudgetError):
    """Richardson extrapolation did not settle; the sequence tail is attached"""


class InsufficientSamplesError(NumericBudgetError):
    """Monte Carlo error too large relative to the estimate"""


# ================================================
# CHECK FAILURES (exit 1)
# ================================================

class UnimodalityError(ToolkitError, ArithmeticError):
    """A density that must be radially nonincreasing went negative"""

    exit_code = 1
