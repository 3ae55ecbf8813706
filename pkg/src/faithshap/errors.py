"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numeric failures with 3.
"""


class FaithShapError(Exception):
    """Base class for all package errors."""


class DomainError(FaithShapError, ValueError):
    """An argument violates a documented precondition."""


class ConfigError(FaithShapError, ValueError):
    """Invalid configuration: unknown names, bad parameter combinations."""


class ParseError(ConfigError):
    """A file or JSON payload does not match the expected schema."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class ValidityError(DomainError):
    """A weighting scheme fails its positivity requirements."""


class NumericError(FaithShapError, ArithmeticError):
    """A linear solve failed or produced an unacceptable residual."""


class EvaluationError(FaithShapError):
    """A value-function evaluation failed; carries the offending coalition."""

    def __init__(self, message, coalition=None):
        self.coalition = coalition
        if coalition is not None:
            message = f"{message} (coalition {sorted(coalition)})"
        super().__init__(message)
