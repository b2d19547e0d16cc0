"""Exception hierarchy shared by all modules."""


class QSpecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QSpecError, ValueError):
    """An argument lies outside the domain of the requested function."""


class PoleError(QSpecError, ZeroDivisionError):
    """Evaluation hit a vanishing denominator factor."""


class NoConvergence(QSpecError, ArithmeticError):
    """A series failed to converge within the term budget."""


class ConvergenceError(QSpecError, ArithmeticError):
    """An iterative solver exhausted its iteration budget."""
