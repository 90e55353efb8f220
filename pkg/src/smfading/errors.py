"""Exception hierarchy shared by the numerical modules."""


class SmFadingError(Exception):
    """Base class for all library errors."""


class DomainError(SmFadingError, ValueError):
    """Argument outside the domain of a special function."""


class ContourError(SmFadingError):
    """No vertical line separates the left and right pole sets of a Mellin-Barnes integrand."""


class ConvergenceError(SmFadingError):
    """A quadrature failed to reach its tolerance within the refinement budget."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class DivergenceError(ConvergenceError):
    """An improper integral does not converge for the given parameters."""


class ConsistencyError(SmFadingError):
    """Two independent evaluation routes disagree beyond their combined tolerance."""
