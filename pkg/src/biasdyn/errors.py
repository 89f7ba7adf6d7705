class BiasDynError(Exception):
    """Base class for errors raised by biasdyn."""


class ValidationError(BiasDynError, ValueError):
    """Invalid graph, state, bias or scenario input."""


class DomainError(ValidationError):
    """Argument outside a function's domain."""


class NumericError(BiasDynError, ArithmeticError):
    """A non-finite value appeared during a computation."""


class PreconditionUnmet(BiasDynError):
    """A check's hypothesis does not hold, so its verdict is undefined."""
