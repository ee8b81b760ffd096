"""Exception types shared across the package."""


class InvalidGeometry(ValueError):
    """A geometry violates one of its invariants."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class DomainError(ValueError):
    """Inputs lie outside the domain where a formula is defined."""


class ConvergenceError(ArithmeticError):
    """Adaptive quadrature exhausted its depth budget before reaching tolerance."""


class InvalidSweep(ValueError):
    """A sweep specification is contradictory or incomplete."""
