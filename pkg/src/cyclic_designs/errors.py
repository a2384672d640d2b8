"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or out-of-range input (bad dimension, ragged array, ...)."""


class ContractViolation(ValueError):
    """An input fails a numerical precondition (not unitary, not Hermitian, ...)."""


class DomainError(ValueError):
    """A parameter lies outside the region where a construction is defined."""


class ConstructionError(RuntimeError):
    """A construction could not produce a valid object for admissible input."""
