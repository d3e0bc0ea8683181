"""Exception hierarchy.

The CLI maps these onto exit codes: validation and domain problems exit 1,
convergence failures exit 2.
"""


class KerrWignerError(Exception):
    exit_code = 1


class ValidationError(KerrWignerError, ValueError):
    """Input object violates an invariant (non-Hermitian matrix, bad shape, ...)."""


class DomainError(KerrWignerError, ValueError):
    """Argument outside the mathematical domain of an operation (e.g. a branch cut)."""


class DimensionError(DomainError):
    pass


class ScalingRequiredError(DomainError, OverflowError):
    """Unscaled Hermite value is not representable; use ``hermite2_scaled``."""


class ConvergenceError(KerrWignerError):
    exit_code = 2


class SeriesError(ConvergenceError):
    def __init__(self, message, partial=None, tail=None):
        super().__init__(message)
        self.partial = partial
        self.tail = tail


class QuadratureError(ConvergenceError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TruncationError(ConvergenceError):
    def __init__(self, message, tail):
        super().__init__(message)
        self.tail = tail


class IntegratorError(ConvergenceError):
    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine
