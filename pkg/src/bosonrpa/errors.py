"""Exception types raised across the package."""


class BosonRPAError(Exception):
    """Base class for all package errors."""


class InvalidArgument(BosonRPAError, ValueError):
    pass


class DomainError(BosonRPAError, ValueError):
    pass


class NumericalFailure(BosonRPAError, RuntimeError):
    """A root finder or quadrature did not reach its tolerance."""

    def __init__(self, message, **diagnostics):
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)
        self.diagnostics = diagnostics


class NotPSDError(BosonRPAError, ValueError):
    pass


class IllConditionedError(NumericalFailure):
    pass


class PoleEvaluationError(BosonRPAError, ZeroDivisionError):
    pass


class NoPlasmonError(BosonRPAError, ValueError):
    pass
