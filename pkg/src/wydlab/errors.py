"""Exception taxonomy shared across the package."""


class WydlabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(WydlabError, ValueError):
    """Malformed or out-of-contract input (non-Hermitian, bad trace, ...)."""


class DimensionError(InputError):
    """Shape or tensor-factor dimension mismatch."""


class DomainError(WydlabError, ValueError):
    """A scalar function was evaluated outside its domain."""


class ParameterError(WydlabError, ValueError):
    """A numerical parameter (p, r, t, ...) is outside its allowed range."""


class KernelViolationError(WydlabError, ValueError):
    """A kernel/support inclusion required by the operation does not hold."""


class CommutationError(WydlabError, ValueError):
    """Inputs that must commute do not, beyond tolerance."""


class ContractionError(InputError):
    """Operator norm exceeds 1 where a contraction is required."""


class NumericalError(WydlabError, RuntimeError):
    """A numerical procedure failed to converge to its target accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
