class SensireachError(Exception):
    """Base class for all library errors."""


class DimensionError(SensireachError, ValueError):
    pass


class TaylorOrderError(SensireachError, ValueError):
    def __init__(self, order, minimum):
        super().__init__(
            f"Taylor order too small: r={order} violates r > ||A||*tau - 2; minimum admissible r is {minimum}"
        )
        self.order = order
        self.minimum = minimum


class BlowUpError(SensireachError, ArithmeticError):
    """Raised when a trajectory leaves the finite floats."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class OrderingError(SensireachError, ArithmeticError):
    """Lower bound above upper bound in a mixed-monotone evaluation."""


class StepError(SensireachError):
    """A failure inside one named pipeline step."""

    def __init__(self, step, cause):
        super().__init__(f"{step} failed: {cause}")
        self.step = step
        self.cause = cause
