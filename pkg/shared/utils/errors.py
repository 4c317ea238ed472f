"""
Error Hierarchy

Every failure raised by the library derives from EntvolError and carries the
process exit code the CLI reports for it:

- 1: configuration / input errors
- 2: numeric failures
"""


class EntvolError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1
    category: str = "error"


# =============================================================================
# Configuration / input errors (exit 1)
# =============================================================================

class ConfigError(EntvolError):
    """Invalid run configuration."""

    exit_code = 1
    category = "config"


class DimensionMismatchError(ConfigError, ValueError):
    """Operands have incompatible dimensions."""


class InvalidSpecError(ConfigError, ValueError):
    """A parameter record violates its declared constraints."""


class ScaledParameterRangeError(InvalidSpecError):
    """A scaled parameter lies outside its admissible interval."""


class PositivityViolation(InvalidSpecError):
    """Constructed POVM elements are not positive semidefinite."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class InvariantViolation(ConfigError):
    """
    A value fails a domain invariant (trace, Hermiticity, positivity).

    Deliberately not a ValueError, so pydantic validators re-raise it as-is.
    """

    def __init__(self, message: str, quantity: str, value: float):
        super().__init__(f"{message} ({quantity}={value:.3e})")
        self.quantity = quantity
        self.value = value


class StateFileError(ConfigError):
    """A state or POVM file cannot be parsed."""


# =============================================================================
# Numeric errors (exit 2)
# =============================================================================

class NumericError(EntvolError):
    """A numerical routine failed."""

    exit_code = 2
    category = "numeric"


class ComputationError(NumericError):
    """A matrix decomposition did not converge."""


class NotInteriorError(NumericError):
    """A sampler state left the interior of the state space."""
