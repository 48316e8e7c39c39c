"""Exception types raised across the package."""


class SizeError(ValueError):
    """A truncated space is too small, or a composite space too large."""


class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class StateValidationError(ValueError):
    """A state fails its type invariants (norm, Hermiticity, trace, positivity)."""


class ContractError(RuntimeError):
    """Two independent routes to the same quantity disagree beyond tolerance."""
