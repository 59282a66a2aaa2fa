"""Исключения innokit. CLI переводит их в коды возврата (см. handlers.common)."""


class InnokitError(Exception):
    """Base class for all library errors."""


class ValidationError(InnokitError, ValueError):
    """Invalid input: malformed pmf, out-of-range parameter, mismatched streams."""


class InfeasibleError(InnokitError):
    """No coupling or plan satisfies the constraints (e.g. output alphabet too small)."""


class WorkLimitExceeded(InnokitError):
    def __init__(self, limit: int, what: str = "candidate supports"):
        self.limit = limit
        self.what = what
        super().__init__(f"work limit exceeded: more than {limit} {what} examined")


class NumericalDriftError(InnokitError):
    """Residual bookkeeping drifted beyond the allowed limit."""
