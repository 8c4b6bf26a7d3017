"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Raised when matrix or subsystem dimensions do not fit together."""


class ValidationError(ValueError):
    """Raised when an input violates a physical invariant.

    ``invariant`` names the violated property (``"hermiticity"``, ``"psd"``,
    ``"trace"``, ``"normalization"``, ``"unitarity"``, ``"range"``, ...) so
    that callers such as the CLI can report it without parsing messages.
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class NumericalError(RuntimeError):
    """Raised when an objective evaluates to a non-finite value."""
