"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class DomainError(ValueError):
    """An input lies outside the domain an operation is defined on."""


class NumericError(ArithmeticError):
    """An internal consistency check failed beyond tolerance."""
