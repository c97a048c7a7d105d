"""Exception types shared across the package.

The hierarchy distinguishes caller mistakes (bad values, arguments outside an
operation's domain, malformed configuration) from numerical failures inside an
otherwise valid call, and reserves a dedicated type for the one condition that
always indicates a solver bug: evaluating an objective outside its feasible
set.
"""

__all__ = [
    "ProjSearchError",
    "InvalidInputError",
    "DomainError",
    "DiagnosticUnavailableError",
    "NumericalError",
    "ConfigError",
    "ProblemNotFoundError",
    "ContractViolationError",
]


class ProjSearchError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(ProjSearchError, ValueError):
    """Malformed value: wrong shape, non-finite entries, non-SPD matrix, ..."""


class DomainError(ProjSearchError, ValueError):
    """Structurally valid argument outside the operation's domain
    (infeasible anchor, negative curve parameter, corner of a box, ...)."""


class DiagnosticUnavailableError(DomainError):
    """A diagnostic cannot be computed at this point (e.g. no feasible
    finite-difference stencil, or the problem carries no gradient oracle)."""


class NumericalError(ProjSearchError, RuntimeError):
    """An iterative numerical routine failed to converge.

    Carries the final residual when available.
    """

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class ConfigError(ProjSearchError, ValueError):
    """Invalid solver/campaign configuration."""


class ProblemNotFoundError(ProjSearchError, KeyError):
    """Unknown benchmark problem identifier."""


class ContractViolationError(ProjSearchError, RuntimeError):
    """The objective oracle was called at an infeasible point.

    Solvers must keep every evaluation inside the feasible set; this error is
    a bug detector, not a recoverable condition.
    """
