"""Exception hierarchy shared by every module."""


class HobodyError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(HobodyError, ValueError):
    pass


class InvalidBodyError(HobodyError, ValueError):
    """A body violates an operation's precondition (o not interior, rho <= 0, ...)."""


class DegenerateBodyError(InvalidBodyError):
    """Input spans fewer dimensions than required."""

    def __init__(self, message, achieved_dim=None):
        super().__init__(message)
        self.achieved_dim = achieved_dim


class SingularMapError(HobodyError, ValueError):
    pass


class NonFiniteIntegrandError(HobodyError, ArithmeticError):
    """An integrand produced NaN or inf; ``direction`` is the offending sample."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class StepOutOfRangeError(HobodyError, ValueError):
    pass


class OutOfRangeError(HobodyError, ValueError):
    pass


class PrecisionFailure(HobodyError, ArithmeticError):
    pass


class InfeasibleError(HobodyError):
    pass


class UnboundedError(HobodyError):
    pass
