"""Exception types shared across the package.

The CLI maps these onto exit codes: precondition failures exit 2,
numerical-conditioning failures exit 3, anything else exits 1.
"""


class SiegelError(Exception):
    """Base class for all package errors."""


class PreconditionError(SiegelError, ValueError):
    """An operation was called with input violating its stated preconditions."""


class ConditioningError(SiegelError, ArithmeticError):
    """A numerical evaluation was refused because it is too ill-conditioned."""


class EstimationError(PreconditionError):
    """A numerical estimator ran out of usable data points."""


class InternalCheckError(SiegelError, RuntimeError):
    """An internal consistency assertion failed; indicates a bug, not bad input."""
