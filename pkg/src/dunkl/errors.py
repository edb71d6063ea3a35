"""Exception types shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateWeightError(DomainError):
    """The Jacobi weight (1-t^2)^(kappa-1) degenerates at kappa = 0.

    Callers must dispatch to the classical (kappa = 0) branch instead of
    building a quadrature rule for the limiting point-mass weight.
    """


class CapacityError(RuntimeError):
    """A request exceeds the configured cost ceiling (e.g. tensor dimension)."""
