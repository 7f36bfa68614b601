"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments fall outside the domain where a quantity is defined."""


class NumericalError(ArithmeticError):
    """A numerical routine produced a result it cannot vouch for."""


class NonConvergence(NumericalError):
    """A series hit its term budget before the stopping rule fired."""


class RuntimeLimit(RuntimeError):
    """A simulation exceeded its event budget."""
